#pragma once

#include <string>

#include <json.hpp>

#include "nc/json_writer.hpp"
#include "nc/matcore.hpp"
#include "nc/realize.hpp"
#include "nc/tracial.hpp"

namespace nc {

// File formats:
//   matrix  {"rows": r, "cols": c, "data": [[[re,im], ...], ...]}
//   tuple   {"n": n, "d": d, "mats": [matrix, ...]}
//   path    {"d":, "n":, "pad_start":, "pad_end":, "base_tag":, "nodes":
//            [{"t": t, "X": tuple}, ...]}
//   domain  {"forbidden_dets": [[re,im], ...]}   (absent/null: unrestricted)
//   realization {"m":, "d":, "k":, "A": [matrix, ...], "b": matrix, "c": matrix}

ComplexMatrix matrix_from_json(const nlohmann::json& j);
MatrixTuple tuple_from_json(const nlohmann::json& j);
PathSpec path_from_json(const nlohmann::json& j);
DomainSpec domain_from_json(const nlohmann::json& j);
Realization realization_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);

void write_matrix(JsonWriter& w, const ComplexMatrix& m);
void write_tuple(JsonWriter& w, const MatrixTuple& x);
void write_divisor(JsonWriter& w, const DivisorValue& g);
void write_path(JsonWriter& w, const PathSpec& p);
void write_realization(JsonWriter& w, const Realization& r);

}  // namespace nc
