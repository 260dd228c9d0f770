#include "rglm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace rglm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

std::string family_token(const GlmFamily& family) {
  const char* name =
      family.kind == Family::kQuadratic ? "quadratic" : "logistic";
  return std::string(name) + ":" + format_double(family.noise_scale);
}

GlmFamily parse_family_token(const std::string& token) {
  const auto colon = token.find(':');
  const std::string name = token.substr(0, colon);
  double scale = 1.0;
  if (colon != std::string::npos) {
    try {
      scale = std::stod(token.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("dataset: bad family token " + token);
    }
  }
  if (name == "quadratic") return GlmFamily::quadratic(scale);
  if (name == "logistic") return GlmFamily::logistic();
  throw std::invalid_argument("dataset: unknown family " + token);
}

std::string scale_convention(const Dataset& data) {
  bool scaled = false, unit = false, none = false;
  for (const auto& op : data.ops) {
    std::visit(Overloaded{
                   [&](const DenseOp&) { none = true; },
                   [&](const EntryOp&) { scaled = true; },
                   [&](const PairOp&) { scaled = true; },
                   [&](const MaskedEntryOp&) { unit = true; },
               },
               op);
  }
  if (scaled + unit + none > 1) return "mixed";
  if (scaled) return "scaled";
  if (unit) return "unit";
  return "none";
}

double parse_double(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("dataset: bad ") + what + " '" +
                                tok + "'");
  }
}

int parse_index(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("dataset: bad ") + what + " '" +
                                tok + "'");
  }
}

std::string csv_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

double require_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw std::invalid_argument(std::string("constraint: missing numeric '") +
                                key + "'");
  }
  return j[key].get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_dataset(const Dataset& data, std::ostream& out) {
  out << "# rglm-dataset v1 " << data.d1 << ' ' << data.d2 << ' '
      << format_double(data.effective_n) << ' ' << family_token(data.family)
      << ' ' << scale_convention(data) << '\n';
  for (std::size_t i = 0; i < data.ops.size(); ++i) {
    const double y = data.responses[i];
    std::visit(Overloaded{
                   [&](const DenseOp& op) {
                     out << "dense";
                     for (Eigen::Index r = 0; r < op.a.rows(); ++r) {
                       for (Eigen::Index c = 0; c < op.a.cols(); ++c) {
                         out << ' ' << format_double(op.a(r, c));
                       }
                     }
                   },
                   [&](const EntryOp& op) {
                     out << "entry " << op.k << ' ' << op.l;
                   },
                   [&](const PairOp& op) {
                     out << "pair " << op.k << ' ' << op.l << ' ' << op.j;
                   },
                   [&](const MaskedEntryOp& op) {
                     out << "masked " << op.k << ' ' << op.l;
                   },
               },
               data.ops[i]);
    out << ' ' << format_double(y) << '\n';
  }
  if (!out) throw std::runtime_error("dataset write failed");
}

void save_dataset(const Dataset& data, const std::string& path) {
  auto out = open_out(path);
  save_dataset(data, out);
}

Dataset load_dataset(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::invalid_argument("dataset: empty input");
  }
  std::istringstream hs(header);
  std::string hash, magic, version, family_tok, convention;
  int d1 = 0, d2 = 0;
  std::string n_tok;
  hs >> hash >> magic >> version >> d1 >> d2 >> n_tok >> family_tok >>
      convention;
  if (hash != "#" || magic != "rglm-dataset" || version != "v1" || !hs) {
    throw std::invalid_argument("dataset: bad header '" + header + "'");
  }
  const double effective_n = parse_double(n_tok, "sample size");
  const GlmFamily family = parse_family_token(family_tok);
  if (d1 < 1 || d2 < 1) {
    throw std::invalid_argument("dataset: bad dimensions in header");
  }
  const double struct_scale = std::sqrt(static_cast<double>(d1) * d2);

  std::vector<MeasurementOp> ops;
  std::vector<double> responses;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    const std::string& kind = toks[0];
    if (kind == "dense") {
      const std::size_t want = static_cast<std::size_t>(d1) * d2 + 2;
      if (toks.size() != want) {
        throw std::invalid_argument("dataset: dense line has wrong arity");
      }
      Matrix a(d1, d2);
      std::size_t pos = 1;
      for (int r = 0; r < d1; ++r) {
        for (int c = 0; c < d2; ++c) {
          a(r, c) = parse_double(toks[pos++], "dense entry");
        }
      }
      ops.emplace_back(DenseOp{std::move(a)});
      responses.push_back(parse_double(toks.back(), "response"));
    } else if (kind == "entry") {
      if (toks.size() != 4) {
        throw std::invalid_argument("dataset: entry line has wrong arity");
      }
      ops.emplace_back(EntryOp{parse_index(toks[1], "row"),
                               parse_index(toks[2], "col"), struct_scale});
      responses.push_back(parse_double(toks[3], "response"));
    } else if (kind == "pair") {
      if (toks.size() != 5) {
        throw std::invalid_argument("dataset: pair line has wrong arity");
      }
      ops.emplace_back(PairOp{parse_index(toks[1], "row"),
                              parse_index(toks[2], "col"),
                              parse_index(toks[3], "col"), struct_scale});
      responses.push_back(parse_double(toks[4], "response"));
    } else if (kind == "masked") {
      if (toks.size() != 4) {
        throw std::invalid_argument("dataset: masked line has wrong arity");
      }
      ops.emplace_back(MaskedEntryOp{parse_index(toks[1], "row"),
                                     parse_index(toks[2], "col"), 1.0});
      responses.push_back(parse_double(toks[3], "response"));
    } else {
      throw std::invalid_argument("dataset: unknown op kind '" + kind + "'");
    }
  }
  return make_dataset(d1, d2, std::move(ops), std::move(responses), family,
                      effective_n);
}

Dataset load_dataset(const std::string& path) {
  auto in = open_in(path);
  return load_dataset(in);
}

void save_trace_csv(const SolveTrace& trace, std::ostream& out) {
  out << "t,eta,objective,h,rel_dist,num_rank,fro\n";
  for (const auto& row : trace.rows) {
    out << row.t << ',' << format_double(row.eta) << ','
        << format_double(row.objective) << ',' << csv_field(row.h) << ','
        << csv_field(row.rel_dist) << ',' << row.num_rank << ','
        << format_double(row.fro) << '\n';
  }
  if (!out) throw std::runtime_error("trace write failed");
}

void save_trace_csv(const SolveTrace& trace, const std::string& path) {
  auto out = open_out(path);
  save_trace_csv(trace, out);
}

void save_matrix(const Matrix& x, const std::string& path) {
  auto out = open_out(path);
  out << x.rows() << ' ' << x.cols() << '\n';
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c > 0) out << ' ';
      out << format_double(x(r, c));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("matrix write failed: " + path);
}

Matrix load_matrix(const std::string& path) {
  auto in = open_in(path);
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
    throw std::invalid_argument("matrix: bad dimension line in " + path);
  }
  Matrix x(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(in >> x(r, c))) {
        throw std::invalid_argument("matrix: truncated data in " + path);
      }
    }
  }
  return x;
}

ConstraintSpec constraint_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("constraint: bad json: ") +
                                e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw std::invalid_argument("constraint: missing 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "unconstrained") return Unconstrained{};
  if (type == "fro_ball") return FroBall{require_number(j, "xi")};
  if (type == "nuc_ball") return NucBall{require_number(j, "xi")};
  if (type == "schatten") {
    return SchattenP{static_cast<int>(require_number(j, "p")),
                     require_number(j, "xi")};
  }
  if (type == "op_norm_ball") return OpNormBall{require_number(j, "xi")};
  if (type == "factor_row_clip") {
    return FactorRowClip{require_number(j, "a_u"), require_number(j, "a_v")};
  }
  if (type == "alt_inf_ball" || type == "row_centered_inf") {
    double xi = require_number(j, "xi");
    int max_iters = 50;
    double tol = 1e-7;
    if (j.contains("max_iters")) {
      max_iters = static_cast<int>(require_number(j, "max_iters"));
    }
    if (j.contains("tol")) tol = require_number(j, "tol");
    if (type == "alt_inf_ball") return AltInfBall{xi, max_iters, tol};
    return RowCenteredInf{xi, max_iters, tol};
  }
  throw std::invalid_argument("constraint: unknown type '" + type + "'");
}

std::string constraint_to_json_text(const ConstraintSpec& spec) {
  nlohmann::json j;
  std::visit(Overloaded{
                 [&](const Unconstrained&) { j["type"] = "unconstrained"; },
                 [&](const FroBall& b) {
                   j["type"] = "fro_ball";
                   j["xi"] = b.xi;
                 },
                 [&](const NucBall& b) {
                   j["type"] = "nuc_ball";
                   j["xi"] = b.xi;
                 },
                 [&](const SchattenP& b) {
                   j["type"] = "schatten";
                   j["p"] = b.p;
                   j["xi"] = b.xi;
                 },
                 [&](const OpNormBall& b) {
                   j["type"] = "op_norm_ball";
                   j["xi"] = b.xi;
                 },
                 [&](const FactorRowClip& b) {
                   j["type"] = "factor_row_clip";
                   j["a_u"] = b.a_u;
                   j["a_v"] = b.a_v;
                 },
                 [&](const AltInfBall& b) {
                   j["type"] = "alt_inf_ball";
                   j["xi"] = b.xi;
                   j["max_iters"] = b.max_iters;
                   j["tol"] = b.tol;
                 },
                 [&](const RowCenteredInf& b) {
                   j["type"] = "row_centered_inf";
                   j["xi"] = b.xi;
                   j["max_iters"] = b.max_iters;
                   j["tol"] = b.tol;
                 },
             },
             spec);
  return j.dump();
}

}  // namespace rglm
