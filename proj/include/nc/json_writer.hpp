#pragma once

#include <ostream>
#include <string_view>
#include <vector>

#include "nc/complex_matrix.hpp"

namespace nc {

// Streaming JSON writer with deterministic output: keys in insertion order,
// numbers rendered with 17 significant digits so doubles round-trip exactly
// and identical inputs give byte-identical reports.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& os) : os_(os) {}

    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view k);
    JsonWriter& value(double v);
    JsonWriter& value(Complex v);  // [re, im]
    JsonWriter& value(std::string_view s);
    JsonWriter& value(const char* s) { return value(std::string_view(s)); }
    JsonWriter& value(bool b);
    JsonWriter& value(long long v);
    JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
    JsonWriter& value(long v) { return value(static_cast<long long>(v)); }
    JsonWriter& value_raw(std::string_view json);  // pre-rendered JSON

private:
    void comma();
    void value_string(std::string_view s);
    std::ostream& os_;
    std::vector<bool> first_;   // per nesting level
    bool pending_key_ = false;
};

}  // namespace nc
