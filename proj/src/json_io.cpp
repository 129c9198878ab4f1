#include "nc/json_io.hpp"

#include <fstream>

#include "nc/error.hpp"

namespace nc {

namespace {

Complex complex_from_json(const nlohmann::json& j) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError("expected a complex value [re, im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

int int_field(const nlohmann::json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_number_integer())
        throw ValidationError(std::string("missing integer field \"") + name + "\"");
    return j[name].get<int>();
}

}  // namespace

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    const int rows = int_field(j, "rows");
    const int cols = int_field(j, "cols");
    if (!j.contains("data") || !j["data"].is_array() ||
        static_cast<int>(j["data"].size()) != rows)
        throw ValidationError("matrix \"data\" must be an array of rows");
    std::vector<Complex> entries;
    entries.reserve(static_cast<size_t>(rows) * cols);
    for (const auto& row : j["data"]) {
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ValidationError("matrix row length does not match \"cols\"");
        for (const auto& cell : row) entries.push_back(complex_from_json(cell));
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

MatrixTuple tuple_from_json(const nlohmann::json& j) {
    const int n = int_field(j, "n");
    const int d = int_field(j, "d");
    if (!j.contains("mats") || !j["mats"].is_array() ||
        static_cast<int>(j["mats"].size()) != d)
        throw ValidationError("tuple \"mats\" must hold d matrices");
    std::vector<ComplexMatrix> mats;
    mats.reserve(static_cast<size_t>(d));
    for (const auto& m : j["mats"]) {
        mats.push_back(matrix_from_json(m));
        if (mats.back().rows() != n || mats.back().cols() != n)
            throw ValidationError("tuple component is not n x n");
    }
    return MatrixTuple(std::move(mats));
}

PathSpec path_from_json(const nlohmann::json& j) {
    PathSpec p;
    p.d = int_field(j, "d");
    p.n = int_field(j, "n");
    p.pad_start = j.contains("pad_start") ? j["pad_start"].get<int>() : 1;
    p.pad_end = j.contains("pad_end") ? j["pad_end"].get<int>() : 1;
    if (j.contains("base_tag") && j["base_tag"].is_string())
        p.base_tag = j["base_tag"].get<std::string>();
    if (!j.contains("nodes") || !j["nodes"].is_array())
        throw ValidationError("path needs a \"nodes\" array");
    for (const auto& nd : j["nodes"]) {
        if (!nd.contains("t") || !nd["t"].is_number() || !nd.contains("X"))
            throw ValidationError("path node needs \"t\" and \"X\"");
        p.nodes.push_back({nd["t"].get<double>(), tuple_from_json(nd["X"])});
    }
    p.validate();
    return p;
}

DomainSpec domain_from_json(const nlohmann::json& j) {
    if (j.is_null() || !j.contains("forbidden_dets") || j["forbidden_dets"].is_null())
        return DomainSpec::unrestricted();
    if (!j["forbidden_dets"].is_array())
        throw ValidationError("\"forbidden_dets\" must be an array of complex values");
    std::vector<Complex> lam;
    for (const auto& v : j["forbidden_dets"]) lam.push_back(complex_from_json(v));
    return DomainSpec::g_lambda(std::move(lam));
}

Realization realization_from_json(const nlohmann::json& j) {
    Realization r;
    r.m = int_field(j, "m");
    r.d = int_field(j, "d");
    r.k = int_field(j, "k");
    if (!j.contains("A") || !j["A"].is_array() ||
        static_cast<int>(j["A"].size()) != r.d + 1)
        throw ValidationError("realization \"A\" must hold d+1 coefficient matrices");
    for (const auto& a : j["A"]) {
        r.A.push_back(matrix_from_json(a));
        if (r.A.back().rows() != r.m || r.A.back().cols() != r.m)
            throw ValidationError("realization coefficient is not m x m");
    }
    if (!j.contains("b") || !j.contains("c"))
        throw ValidationError("realization needs \"b\" and \"c\"");
    r.b = matrix_from_json(j["b"]);
    r.c = matrix_from_json(j["c"]);
    if (r.b.rows() != r.m || r.b.cols() != r.k || r.c.rows() != r.m || r.c.cols() != r.k)
        throw ValidationError("realization b, c must be m x k");
    return r;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_matrix(JsonWriter& w, const ComplexMatrix& m) {
    w.begin_object();
    w.key("rows").value(m.rows());
    w.key("cols").value(m.cols());
    w.key("data").begin_array();
    for (int r = 0; r < m.rows(); ++r) {
        w.begin_array();
        for (int c = 0; c < m.cols(); ++c) w.value(m(r, c));
        w.end_array();
    }
    w.end_array();
    w.end_object();
}

void write_tuple(JsonWriter& w, const MatrixTuple& x) {
    w.begin_object();
    w.key("n").value(x.n);
    w.key("d").value(x.d);
    w.key("mats").begin_array();
    for (const ComplexMatrix& m : x.mats) write_matrix(w, m);
    w.end_array();
    w.end_object();
}

void write_divisor(JsonWriter& w, const DivisorValue& g) {
    w.begin_object();
    w.key("n").value(g.n);
    w.key("d").value(static_cast<long long>(g.components.size()));
    w.key("components").begin_array();
    for (const ComplexMatrix& m : g.components) write_matrix(w, m);
    w.end_array();
    w.end_object();
}

void write_path(JsonWriter& w, const PathSpec& p) {
    w.begin_object();
    w.key("d").value(p.d);
    w.key("n").value(p.n);
    w.key("pad_start").value(p.pad_start);
    w.key("pad_end").value(p.pad_end);
    w.key("base_tag").value(p.base_tag);
    w.key("nodes").begin_array();
    for (const PathNode& nd : p.nodes) {
        w.begin_object();
        w.key("t").value(nd.t);
        w.key("X");
        write_tuple(w, nd.x);
        w.end_object();
    }
    w.end_array();
    w.end_object();
}

void write_realization(JsonWriter& w, const Realization& r) {
    w.begin_object();
    w.key("m").value(r.m);
    w.key("d").value(r.d);
    w.key("k").value(r.k);
    w.key("A").begin_array();
    for (const ComplexMatrix& a : r.A) write_matrix(w, a);
    w.end_array();
    w.key("b");
    write_matrix(w, r.b);
    w.key("c");
    write_matrix(w, r.c);
    w.end_object();
}

}  // namespace nc
