#include "nc/json_writer.hpp"

#include <cmath>
#include <cstdio>

#include "nc/numfmt.hpp"

namespace nc {

void JsonWriter::comma() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!first_.empty()) {
        if (!first_.back()) os_ << ",";
        first_.back() = false;
    }
}

JsonWriter& JsonWriter::begin_object() {
    comma();
    os_ << "{";
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    os_ << "}";
    first_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    comma();
    os_ << "[";
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    os_ << "]";
    first_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
    comma();
    value_string(k);
    os_ << ":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    comma();
    if (std::isfinite(v)) {
        os_ << format_17g(v);
    } else {
        os_ << "null";
    }
    return *this;
}

JsonWriter& JsonWriter::value(Complex v) {
    begin_array();
    value(v.real());
    value(v.imag());
    return end_array();
}

JsonWriter& JsonWriter::value(std::string_view s) {
    comma();
    value_string(s);
    return *this;
}

JsonWriter& JsonWriter::value(bool b) {
    comma();
    os_ << (b ? "true" : "false");
    return *this;
}

JsonWriter& JsonWriter::value(long long v) {
    comma();
    os_ << v;
    return *this;
}

JsonWriter& JsonWriter::value_raw(std::string_view json) {
    comma();
    os_ << json;
    return *this;
}

void JsonWriter::value_string(std::string_view s) {
    os_ << '"';
    for (char c : s) {
        switch (c) {
            case '"': os_ << "\\\""; break;
            case '\\': os_ << "\\\\"; break;
            case '\n': os_ << "\\n"; break;
            case '\t': os_ << "\\t"; break;
            case '\r': os_ << "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    os_ << buf;
                } else {
                    os_ << c;
                }
        }
    }
    os_ << '"';
}

}  // namespace nc
