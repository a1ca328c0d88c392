#include "kobdyn/map_spec.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "kobdyn/lft_models.hpp"

namespace kobdyn {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("map spec: " + msg); }

const json& need(const json& doc, const std::string& field) {
  const auto it = doc.find(field);
  if (it == doc.end()) fail("missing field \"" + field + "\"");
  return *it;
}

void reject_unknown(const json& doc, std::set<std::string> allowed,
                    const std::string& kind) {
  allowed.insert("kind");
  allowed.insert("transport");
  for (const auto& item : doc.items()) {
    if (!allowed.count(item.key())) {
      fail("unknown field \"" + item.key() + "\" in a " + kind + " spec");
    }
  }
}

double json_to_real(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field + " must be a real number");
  return j.get<double>();
}

long json_to_count(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field + " must be an integer");
  return j.get<long>();
}

CMatrix json_to_cmatrix(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field + " must be an array of rows");
  const int rows = static_cast<int>(j.size());
  int cols = -1;
  CMatrix m;
  for (int i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array()) fail(field + " rows must be arrays of [re, im] pairs");
    if (cols < 0) {
      cols = static_cast<int>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<int>(row.size()) != cols) {
      fail(field + " rows have inconsistent lengths");
    }
    for (int k = 0; k < cols; ++k) {
      m(i, k) = json_to_complex(row[k], field + " entry");
    }
  }
  if (rows == 0) m.resize(0, 0);
  return m;
}

RVector json_to_rvector(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field + " must be an array of reals");
  RVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<int>(i)] = json_to_real(j[i], field + " entry");
  }
  return v;
}

void check_declared_dim(const json& doc, const char* name, int derived) {
  if (const auto it = doc.find(name); it != doc.end()) {
    if (json_to_count(*it, name) != derived) {
      fail(std::string("declared ") + name + " = " + it->dump() +
           " contradicts the block sizes (expected " + std::to_string(derived) +
           ")");
    }
  }
}

SelfMap parse_lft_hyperbolic(const json& doc) {
  reject_unknown(doc, {"lambda", "b", "D", "A", "c", "p", "q"}, "lft_hyperbolic");
  HyperbolicLFTForm f;
  f.lambda = json_to_real(need(doc, "lambda"), "lambda");
  f.b = json_to_complex(need(doc, "b"), "b");
  f.D_diag = json_to_cvector(need(doc, "D"), "D");
  f.A = json_to_cmatrix(need(doc, "A"), "A");
  f.c = json_to_cvector(need(doc, "c"), "c");
  if (f.A.rows() != f.A.cols()) fail("A must be square");
  if (f.c.size() != f.A.rows()) fail("c must match the row count of A");
  f.p = 1 + static_cast<int>(f.D_diag.size());
  f.q = f.p + static_cast<int>(f.A.rows());
  check_declared_dim(doc, "p", f.p);
  check_declared_dim(doc, "q", f.q);
  return hyperbolic_to_self_map(validate_hyperbolic_form(f));
}

SelfMap parse_lft_parabolic(const json& doc) {
  reject_unknown(doc, {"a", "b", "c", "D", "A", "r", "p", "q"}, "lft_parabolic");
  ParabolicLFTForm f;
  f.a = json_to_cvector(need(doc, "a"), "a");
  f.b = json_to_complex(need(doc, "b"), "b");
  f.c = json_to_cvector(need(doc, "c"), "c");
  f.D_diag = json_to_cvector(need(doc, "D"), "D");
  f.A = json_to_cmatrix(need(doc, "A"), "A");
  if (f.A.rows() != f.A.cols()) fail("A must be square");
  if (f.c.size() != f.A.rows()) fail("c must match the row count of A");
  f.r = 1 + static_cast<int>(f.a.size());
  f.p = f.r + static_cast<int>(f.D_diag.size());
  f.q = f.p + static_cast<int>(f.A.rows());
  check_declared_dim(doc, "r", f.r);
  check_declared_dim(doc, "p", f.p);
  check_declared_dim(doc, "q", f.q);
  return parabolic_to_self_map(validate_parabolic_form(f));
}

SelfMap parse_ball_automorphism(const json& doc) {
  reject_unknown(doc, {"w", "U"}, "ball_automorphism");
  const CVector w = json_to_cvector(need(doc, "w"), "w");
  std::optional<CMatrix> U;
  if (const auto it = doc.find("U"); it != doc.end()) {
    U = json_to_cmatrix(*it, "U");
    if (U->rows() != w.size() || U->cols() != w.size()) {
      fail("U must be a square matrix matching the length of w");
    }
  }
  return SelfMap::ball_automorphism(w, U);
}

ParsedSpec parse_spec_impl(const json& doc);

SelfMap parse_composition(const json& doc) {
  reject_unknown(doc, {"maps"}, "composition");
  const json& maps = need(doc, "maps");
  if (!maps.is_array() || maps.empty()) {
    fail("composition needs a nonempty \"maps\" array");
  }
  // "maps" is a pipeline: z passes through maps[0], then maps[1], …
  std::optional<SelfMap> acc;
  for (const json& sub : maps) {
    ParsedSpec p = parse_spec_impl(sub);
    if (p.is_semigroup()) fail("composition entries must be maps, not flows");
    acc = acc ? SelfMap::compose(*p.map, *acc) : *p.map;
  }
  return *acc;
}

Semigroup parse_semigroup_affine(const json& doc) {
  reject_unknown(doc, {"lambda", "mu", "b"}, "semigroup_affine_siegel");
  const double lambda = json_to_real(need(doc, "lambda"), "lambda");
  const RVector mu = json_to_rvector(need(doc, "mu"), "mu");
  const Complex b = json_to_complex(need(doc, "b"), "b");
  return Semigroup::affine_siegel(lambda, mu, b);
}

ParsedSpec parse_spec_impl(const json& doc) {
  if (!doc.is_object()) fail("document must be a JSON object");
  const json& kind_field = need(doc, "kind");
  if (!kind_field.is_string()) fail("\"kind\" must be a string");
  ParsedSpec out;
  out.kind = kind_field.get<std::string>();

  if (out.kind == "lft_hyperbolic") {
    out.map = parse_lft_hyperbolic(doc);
  } else if (out.kind == "lft_parabolic") {
    out.map = parse_lft_parabolic(doc);
  } else if (out.kind == "ball_automorphism") {
    out.map = parse_ball_automorphism(doc);
  } else if (out.kind == "composition") {
    out.map = parse_composition(doc);
  } else if (out.kind == "semigroup_affine_siegel") {
    out.semigroup = parse_semigroup_affine(doc);
  } else {
    fail("unknown kind \"" + out.kind + "\"");
  }

  if (const auto it = doc.find("transport"); it != doc.end()) {
    if (!it->is_string() || it->get<std::string>() != "cayley") {
      fail("transport must be the string \"cayley\"");
    }
    if (out.is_semigroup()) fail("flows cannot be transported");
    const Domain target =
        out.map->domain() == Domain::ball ? Domain::siegel : Domain::ball;
    out.map = out.map->transported(target);
  }
  return out;
}

}  // namespace

Complex json_to_complex(const json& j, const std::string& field) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(field + " must be a [re, im] pair");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

CVector json_to_cvector(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field + " must be an array of [re, im] pairs");
  CVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<int>(i)] =
        json_to_complex(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json cvector_to_json(const CVector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

ParsedSpec parse_map_spec(const json& doc) { return parse_spec_impl(doc); }

ParsedSpec load_map_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("map spec: cannot open file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(std::string("map spec: invalid JSON: ") + e.what());
  }
  return parse_map_spec(doc);
}

RunConfig parse_run_config(const json& doc, RunConfig base) {
  if (!doc.is_object()) throw Error("run config must be a JSON object");
  static const std::set<std::string> known = {
      "tol", "max_iter", "cap", "samples", "seed", "eig_tol", "format", "output"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) {
      throw Error("run config: unknown field \"" + item.key() + "\"");
    }
  }
  if (doc.contains("tol")) base.tol = json_to_real(doc["tol"], "tol");
  if (doc.contains("max_iter")) {
    base.max_iter = json_to_count(doc["max_iter"], "max_iter");
  }
  if (doc.contains("cap")) base.cap = json_to_count(doc["cap"], "cap");
  if (doc.contains("samples")) {
    base.samples = static_cast<int>(json_to_count(doc["samples"], "samples"));
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) throw Error("run config: seed must be an integer");
    base.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("eig_tol")) base.eig_tol = json_to_real(doc["eig_tol"], "eig_tol");
  if (doc.contains("format")) {
    if (!doc["format"].is_string()) throw Error("run config: format must be a string");
    base.format = doc["format"].get<std::string>();
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw Error("run config: output must be a string");
    base.output = doc["output"].get<std::string>();
  }
  if (!(base.tol > 0.0)) throw Error("run config: tol must be positive");
  if (base.max_iter <= 0) throw Error("run config: max_iter must be positive");
  if (base.cap <= 0) throw Error("run config: cap must be positive");
  if (base.samples <= 0) throw Error("run config: samples must be positive");
  if (!(base.eig_tol > 0.0)) throw Error("run config: eig_tol must be positive");
  if (base.format != "json" && base.format != "csv") {
    throw Error("run config: format must be \"json\" or \"csv\"");
  }
  return base;
}

RunConfig default_run_config() {
  RunConfig cfg;
  if (const char* path = std::getenv("KOBDYN_CONFIG"); path && *path) {
    std::ifstream in(path);
    if (!in) throw Error(std::string("KOBDYN_CONFIG: cannot open file: ") + path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(std::string("KOBDYN_CONFIG: invalid JSON: ") + e.what());
    }
    cfg = parse_run_config(doc, cfg);
  }
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  return json{{"tol", cfg.tol},         {"max_iter", cfg.max_iter},
              {"cap", cfg.cap},         {"samples", cfg.samples},
              {"seed", cfg.seed},       {"eig_tol", cfg.eig_tol},
              {"format", cfg.format},   {"output", cfg.output}};
}

}  // namespace kobdyn
