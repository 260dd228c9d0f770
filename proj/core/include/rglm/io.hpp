#pragma once

#include <iosfwd>
#include <string>

#include "rglm/glm.hpp"
#include "rglm/project.hpp"
#include "rglm/solve.hpp"

namespace rglm {

// Doubles are written with 17 significant digits everywhere below, so every
// file round-trips bit-exactly.
std::string format_double(double v);

// Columnar dataset text format.
//   # rglm-dataset v1 <d1> <d2> <n> <family> <scale-convention>
//   dense <d1*d2 row-major entries> <y>
//   entry <k> <l> <y>
//   pair <k> <l> <j> <y>
//   masked <k> <l> <y>
// <n> is effective_n; the family token carries the noise scale
// (e.g. quadratic:1). Entry/pair scales are sqrt(d1*d2) by convention,
// masked scales are 1; the scale-convention token (scaled/unit/none/mixed)
// records which applies.
void save_dataset(const Dataset& data, std::ostream& out);
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);

// Trace CSV: header t,eta,objective,h,rel_dist,num_rank,fro; h/rel_dist are
// empty when no truth was supplied.
void save_trace_csv(const SolveTrace& trace, std::ostream& out);
void save_trace_csv(const SolveTrace& trace, const std::string& path);

// Plain matrix text: first line "d1 d2", then one row per line.
void save_matrix(const Matrix& x, const std::string& path);
Matrix load_matrix(const std::string& path);

// Tagged-record JSON for constraint sets, e.g. {"type":"fro_ball","xi":1.0}.
ConstraintSpec constraint_from_json_text(const std::string& text);
std::string constraint_to_json_text(const ConstraintSpec& spec);

}  // namespace rglm
