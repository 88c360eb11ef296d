#include "haug/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace haug {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config field '" + path + "': " + what);
}

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

void check_keys(const json& j, std::initializer_list<const char*> known,
                const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail(path + "." + it.key(), "unknown field");
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long as_long(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

Vec as_vec(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) =
        as_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected an array of rows");
  const std::size_t rows = j.size();
  Vec first = as_vec(j[0], path + "[0]");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), first.size());
  m.row(0) = first;
  for (std::size_t r = 1; r < rows; ++r) {
    Vec row = as_vec(j[r], path + "[" + std::to_string(r) + "]");
    if (row.size() != first.size()) {
      fail(path + "[" + std::to_string(r) + "]", "ragged matrix row");
    }
    m.row(static_cast<Eigen::Index>(r)) = row;
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_to_json(m.row(r)));
  return a;
}

SetDescriptor parse_set(const json& j, const std::string& path) {
  const json& kj = need(j, "kind", path);
  if (!kj.is_string()) fail(path + ".kind", "expected a string");
  const std::string kind = kj.get<std::string>();
  if (kind == "halfspace") {
    check_keys(j, {"kind", "normal", "offset"}, path);
    return Halfspace{as_vec(need(j, "normal", path), path + ".normal"),
                     as_number(need(j, "offset", path), path + ".offset")};
  }
  if (kind == "hyperplane") {
    check_keys(j, {"kind", "normal", "offset"}, path);
    return Hyperplane{as_vec(need(j, "normal", path), path + ".normal"),
                      as_number(need(j, "offset", path), path + ".offset")};
  }
  if (kind == "ball") {
    check_keys(j, {"kind", "center", "radius"}, path);
    return BallDesc{as_vec(need(j, "center", path), path + ".center"),
                    as_number(need(j, "radius", path), path + ".radius")};
  }
  if (kind == "box") {
    check_keys(j, {"kind", "lo", "hi"}, path);
    return BoxDesc{as_vec(need(j, "lo", path), path + ".lo"),
                   as_vec(need(j, "hi", path), path + ".hi")};
  }
  if (kind == "soc") {
    check_keys(j, {"kind", "vertex"}, path);
    return SecondOrderConeSet{as_vec(need(j, "vertex", path), path + ".vertex")};
  }
  if (kind == "prox-sq-norm") {
    check_keys(j, {"kind", "gamma"}, path);
    return ProxSqNormDesc{as_number(need(j, "gamma", path), path + ".gamma")};
  }
  if (kind == "prox-l1") {
    check_keys(j, {"kind", "gamma"}, path);
    return ProxL1Desc{as_number(need(j, "gamma", path), path + ".gamma")};
  }
  if (kind == "resolvent") {
    check_keys(j, {"kind", "M", "b"}, path);
    return ResolventDesc{as_matrix(need(j, "M", path), path + ".M"),
                         as_vec(need(j, "b", path), path + ".b")};
  }
  fail(path + ".kind", "unknown set kind '" + kind + "'");
}

json set_to_json(const SetDescriptor& desc) {
  json j;
  std::visit(
      [&j](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          j["kind"] = "halfspace";
          j["normal"] = vec_to_json(d.normal);
          j["offset"] = d.offset;
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          j["kind"] = "hyperplane";
          j["normal"] = vec_to_json(d.normal);
          j["offset"] = d.offset;
        } else if constexpr (std::is_same_v<T, BallDesc>) {
          j["kind"] = "ball";
          j["center"] = vec_to_json(d.center);
          j["radius"] = d.radius;
        } else if constexpr (std::is_same_v<T, BoxDesc>) {
          j["kind"] = "box";
          j["lo"] = vec_to_json(d.lo);
          j["hi"] = vec_to_json(d.hi);
        } else if constexpr (std::is_same_v<T, SecondOrderConeSet>) {
          j["kind"] = "soc";
          j["vertex"] = vec_to_json(d.vertex);
        } else if constexpr (std::is_same_v<T, ProxSqNormDesc>) {
          j["kind"] = "prox-sq-norm";
          j["gamma"] = d.gamma;
        } else if constexpr (std::is_same_v<T, ProxL1Desc>) {
          j["kind"] = "prox-l1";
          j["gamma"] = d.gamma;
        } else {
          j["kind"] = "resolvent";
          j["M"] = matrix_to_json(d.M);
          j["b"] = vec_to_json(d.b);
        }
      },
      desc);
  return j;
}

WeightRule parse_weight_rule(const std::string& s, const std::string& path) {
  if (s == "displacement-proportional") return WeightRule::DisplacementProportional;
  if (s == "pure-argmax") return WeightRule::PureArgmax;
  fail(path, "unknown weight rule '" + s + "'");
}

bool vec_eq(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

FqneOperator build_operator(const SetDescriptor& desc, Eigen::Index dimension) {
  return std::visit(
      [dimension](const auto& d) -> FqneOperator {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          return halfspace_projector(d);
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          return hyperplane_projector(d);
        } else if constexpr (std::is_same_v<T, BallDesc>) {
          return ball_projector(d.center, d.radius);
        } else if constexpr (std::is_same_v<T, BoxDesc>) {
          return box_projector(d.lo, d.hi);
        } else if constexpr (std::is_same_v<T, SecondOrderConeSet>) {
          return soc_projector(d);
        } else if constexpr (std::is_same_v<T, ProxSqNormDesc>) {
          return prox_sq_norm(d.gamma, dimension);
        } else if constexpr (std::is_same_v<T, ProxL1Desc>) {
          return prox_l1(d.gamma, dimension);
        } else {
          return affine_resolvent(d.M, d.b);
        }
      },
      desc);
}

void ProblemConfig::validate() const {
  if (dimension < 1) fail("dimension", "must be >= 1");
  if (sets.empty()) fail("sets", "must list at least one set");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const std::string path = "sets[" + std::to_string(i) + "]";
    try {
      FqneOperator op = build_operator(sets[i], dimension);
      if (op.dim() != dimension) {
        fail(path, "operates in dimension " + std::to_string(op.dim()) +
                       ", configured dimension is " + std::to_string(dimension));
      }
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
  if (!uniform_distribution) {
    if (weights.size() != sets.size()) {
      fail("distribution.weights", "needs one weight per set");
    }
    try {
      IndexDistribution::categorical(weights);
    } catch (const std::invalid_argument& e) {
      fail("distribution.weights", e.what());
    }
  } else if (!weights.empty()) {
    fail("distribution.weights", "given but the distribution is uniform");
  }
  try {
    block.validate();
  } catch (const std::invalid_argument& e) {
    fail("block", e.what());
  }
  if (!(stopping.tol_step > 0.0)) fail("stopping.tol_step", "must be > 0");
  if (!(stopping.tol_res > 0.0)) fail("stopping.tol_res", "must be > 0");
  if (stopping.window < 0) fail("stopping.window", "must be >= 0");
  if (stopping.max_iter < 1) fail("stopping.max_iter", "must be >= 1");
  if (anchor.size() != 0 && anchor.size() != dimension) {
    fail("anchor", "needs one coordinate per dimension");
  }
  if (anchor.size() != 0 && !anchor.allFinite()) fail("anchor", "must be finite");
  if (replications < 1) fail("replications", "must be >= 1");
}

Vec ProblemConfig::start_point() const {
  return anchor.size() == 0 ? Vec(Vec::Zero(dimension)) : anchor;
}

std::vector<FqneOperator> ProblemConfig::build_family() const {
  std::vector<FqneOperator> family;
  family.reserve(sets.size());
  for (const SetDescriptor& d : sets) family.push_back(build_operator(d, dimension));
  return family;
}

IndexDistribution ProblemConfig::build_distribution() const {
  return uniform_distribution ? IndexDistribution::uniform(sets.size())
                              : IndexDistribution::categorical(weights);
}

bool operator==(const ProblemConfig& a, const ProblemConfig& b) {
  if (a.dimension != b.dimension || !vec_eq(a.anchor, b.anchor) ||
      a.uniform_distribution != b.uniform_distribution || a.weights != b.weights ||
      a.block.M != b.block.M || a.block.delta != b.block.delta ||
      a.block.epsilon != b.block.epsilon || a.block.lambda != b.block.lambda ||
      a.block.weight_rule != b.block.weight_rule ||
      a.stopping.tol_step != b.stopping.tol_step ||
      a.stopping.tol_res != b.stopping.tol_res ||
      a.stopping.window != b.stopping.window ||
      a.stopping.max_iter != b.stopping.max_iter || a.seed != b.seed ||
      a.replications != b.replications || a.sets.size() != b.sets.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.sets.size(); ++i) {
    if (a.sets[i].index() != b.sets[i].index()) return false;
    const bool same = std::visit(
        [&](const auto& da) {
          using T = std::decay_t<decltype(da)>;
          const auto& db = std::get<T>(b.sets[i]);
          if constexpr (std::is_same_v<T, Halfspace> || std::is_same_v<T, Hyperplane>) {
            return vec_eq(da.normal, db.normal) && da.offset == db.offset;
          } else if constexpr (std::is_same_v<T, BallDesc>) {
            return vec_eq(da.center, db.center) && da.radius == db.radius;
          } else if constexpr (std::is_same_v<T, BoxDesc>) {
            return vec_eq(da.lo, db.lo) && vec_eq(da.hi, db.hi);
          } else if constexpr (std::is_same_v<T, SecondOrderConeSet>) {
            return vec_eq(da.vertex, db.vertex);
          } else if constexpr (std::is_same_v<T, ProxSqNormDesc> ||
                               std::is_same_v<T, ProxL1Desc>) {
            return da.gamma == db.gamma;
          } else {
            return da.M.rows() == db.M.rows() && da.M.cols() == db.M.cols() &&
                   (da.M.array() == db.M.array()).all() && vec_eq(da.b, db.b);
          }
        },
        a.sets[i]);
    if (!same) return false;
  }
  return true;
}

ProblemConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"dimension", "anchor", "sets", "distribution", "block", "stopping",
              "seed", "replications"},
             "config");
  ProblemConfig cfg;
  cfg.dimension = as_long(need(j, "dimension", "config"), "dimension");
  if (j.contains("anchor")) cfg.anchor = as_vec(j["anchor"], "anchor");
  const json& sets = need(j, "sets", "config");
  if (!sets.is_array()) fail("sets", "expected an array");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    cfg.sets.push_back(parse_set(sets[i], "sets[" + std::to_string(i) + "]"));
  }
  if (j.contains("distribution")) {
    const json& d = j["distribution"];
    check_keys(d, {"kind", "weights"}, "distribution");
    const json& kj = need(d, "kind", "distribution");
    if (!kj.is_string()) fail("distribution.kind", "expected a string");
    const std::string kind = kj.get<std::string>();
    if (kind == "uniform") {
      cfg.uniform_distribution = true;
    } else if (kind == "categorical") {
      cfg.uniform_distribution = false;
      const json& w = need(d, "weights", "distribution");
      if (!w.is_array()) fail("distribution.weights", "expected an array");
      for (std::size_t i = 0; i < w.size(); ++i) {
        cfg.weights.push_back(
            as_number(w[i], "distribution.weights[" + std::to_string(i) + "]"));
      }
    } else {
      fail("distribution.kind", "unknown distribution '" + kind + "'");
    }
  }
  if (j.contains("block")) {
    const json& b = j["block"];
    check_keys(b, {"M", "delta", "epsilon", "lambda", "weight_rule"}, "block");
    if (b.contains("M")) {
      cfg.block.M = static_cast<int>(as_long(b["M"], "block.M"));
      cfg.block.delta = 0.5 / cfg.block.M;  // keep the 1/(2M) default in step
    }
    if (b.contains("delta")) cfg.block.delta = as_number(b["delta"], "block.delta");
    if (b.contains("epsilon")) {
      cfg.block.epsilon = as_number(b["epsilon"], "block.epsilon");
    }
    if (b.contains("lambda")) cfg.block.lambda = as_number(b["lambda"], "block.lambda");
    if (b.contains("weight_rule")) {
      const json& w = b["weight_rule"];
      if (!w.is_string()) fail("block.weight_rule", "expected a string");
      cfg.block.weight_rule = parse_weight_rule(w.get<std::string>(), "block.weight_rule");
    }
  }
  if (j.contains("stopping")) {
    const json& s = j["stopping"];
    check_keys(s, {"tol_step", "tol_res", "window", "max_iter"}, "stopping");
    if (s.contains("tol_step")) {
      cfg.stopping.tol_step = as_number(s["tol_step"], "stopping.tol_step");
    }
    if (s.contains("tol_res")) {
      cfg.stopping.tol_res = as_number(s["tol_res"], "stopping.tol_res");
    }
    if (s.contains("window")) {
      cfg.stopping.window = static_cast<int>(as_long(s["window"], "stopping.window"));
    }
    if (s.contains("max_iter")) {
      cfg.stopping.max_iter = as_long(s["max_iter"], "stopping.max_iter");
    }
  }
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_integer() && !s.is_number_unsigned()) {
      fail("seed", "expected an integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (j.contains("replications")) {
    cfg.replications = static_cast<int>(as_long(j["replications"], "replications"));
  }
  cfg.validate();
  return cfg;
}

std::string format_config(const ProblemConfig& cfg) {
  json j;
  j["dimension"] = static_cast<long>(cfg.dimension);
  if (cfg.anchor.size() != 0) j["anchor"] = vec_to_json(cfg.anchor);
  j["sets"] = json::array();
  for (const SetDescriptor& d : cfg.sets) j["sets"].push_back(set_to_json(d));
  if (cfg.uniform_distribution) {
    j["distribution"] = {{"kind", "uniform"}};
  } else {
    json w = json::array();
    for (double v : cfg.weights) w.push_back(v);
    j["distribution"] = {{"kind", "categorical"}, {"weights", w}};
  }
  j["block"] = {{"M", cfg.block.M},
                {"delta", cfg.block.delta},
                {"epsilon", cfg.block.epsilon},
                {"lambda", cfg.block.lambda},
                {"weight_rule", to_string(cfg.block.weight_rule)}};
  j["stopping"] = {{"tol_step", cfg.stopping.tol_step},
                   {"tol_res", cfg.stopping.tol_res},
                   {"window", cfg.stopping.window},
                   {"max_iter", cfg.stopping.max_iter}};
  j["seed"] = cfg.seed;
  j["replications"] = cfg.replications;
  return j.dump(2) + "\n";
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void save_config(const ProblemConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config file '" + path + "'");
  out << format_config(cfg);
}

std::vector<Vec> read_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cloud file '" + path + "'");
  std::vector<Vec> cloud;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    lineno += 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      const std::string cell =
          line.substr(start, comma == std::string::npos ? comma : comma - start);
      // strtod instead of std::stod: stod raises out_of_range on subnormal
      // input, which would make a written cloud unreadable.  Non-finite
      // results (overflow, inf, nan) are rejected; every consumer of a
      // cloud needs finite coordinates.
      char* end = nullptr;
      const double value = std::strtod(cell.c_str(), &end);
      bool ok = end != cell.c_str();
      while (ok && *end != '\0') {
        if (!std::isspace(static_cast<unsigned char>(*end))) ok = false;
        else ++end;
      }
      if (ok && !std::isfinite(value)) ok = false;
      if (!ok) {
        throw ConfigError("cloud file '" + path + "' line " + std::to_string(lineno) +
                          ": bad number '" + cell + "'");
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    Vec pt(static_cast<Eigen::Index>(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) pt(static_cast<Eigen::Index>(i)) = row[i];
    if (!cloud.empty() && pt.size() != cloud.front().size()) {
      throw ConfigError("cloud file '" + path + "' line " + std::to_string(lineno) +
                        ": inconsistent column count");
    }
    cloud.push_back(std::move(pt));
  }
  if (cloud.empty()) throw ConfigError("cloud file '" + path + "' has no points");
  return cloud;
}

void write_cloud_csv(const std::string& path, const std::vector<Vec>& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write cloud file '" + path + "'");
  for (const Vec& pt : cloud) {
    for (Eigen::Index i = 0; i < pt.size(); ++i) {
      if (i) out << ',';
      out << format_double(pt(i));
    }
    out << '\n';
  }
}

void ResultRecord::add(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void ResultRecord::add(const std::string& key, double value) {
  entries_.emplace_back(key, format_double(value));
}

void ResultRecord::add(const std::string& key, long value) {
  entries_.emplace_back(key, std::to_string(value));
}

void ResultRecord::add(const std::string& key, std::uint64_t value) {
  entries_.emplace_back(key, std::to_string(value));
}

void ResultRecord::add(const std::string& key, const Vec& value) {
  std::string joined;
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    if (i) joined += ',';
    joined += format_double(value(i));
  }
  entries_.emplace_back(key, joined);
}

std::string ResultRecord::to_text() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

void ResultRecord::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write result file '" + path + "'");
  out << to_text();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace haug
