#include "robustmean/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "robustmean/csv.hpp"
#include "robustmean/error.hpp"

namespace robustmean {
namespace {

using nlohmann::json;

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, std::string("invalid JSON: ") + e.what());
  }
}

void check_object(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(Errc::config, std::string(where) + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw Error(Errc::config, std::string(where) + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const char* where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::config, std::string(where) + ": '" + key + "' has the wrong type");
  }
}

template <typename T>
T require(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw Error(Errc::config, std::string(where) + ": missing '" + key + "'");
  return get_or<T>(j, key, T{}, where);
}

Vector vector_field(const json& j, const char* key, Index length, const char* where) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  if (v.is_number()) return Vector::Constant(length, v.get<double>());
  std::vector<double> values;
  try {
    values = v.get<std::vector<double>>();
  } catch (const json::exception&) {
    throw Error(Errc::config, std::string(where) + ": '" + key + "' must be a number or a list of numbers");
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

RecoverySpec parse_recovery(const json& j) {
  check_object(j, "recovery", {"method", "rank", "max_iter", "tol", "c", "sparsity", "parity_rows", "seed", "mA"});
  RecoverySpec r;
  r.method = parse_recovery_method(require<std::string>(j, "method", "recovery"));
  r.rank = get_or<Index>(j, "rank", r.rank, "recovery");
  r.max_iter = get_or<int>(j, "max_iter", r.max_iter, "recovery");
  r.tol = get_or<double>(j, "tol", r.tol, "recovery");
  r.c = get_or<double>(j, "c", r.c, "recovery");
  r.sparsity = get_or<Index>(j, "sparsity", r.sparsity, "recovery");
  r.parity_rows = get_or<Index>(j, "parity_rows", r.parity_rows, "recovery");
  r.seed = get_or<std::uint64_t>(j, "seed", r.seed, "recovery");
  if (j.contains("mA")) r.mA = get_or<Index>(j, "mA", 0, "recovery");
  if (r.rank < 0 || r.max_iter < 0 || r.tol < 0 || r.c <= 0 || r.sparsity < 0 || r.parity_rows < 0 ||
      (r.mA && *r.mA < 1)) {
    throw Error(Errc::config, "recovery: numeric fields out of range");
  }
  return r;
}

json recovery_json(const RecoverySpec& r) {
  json j{{"method", to_string(r.method)}, {"rank", r.rank},   {"max_iter", r.max_iter},
         {"tol", r.tol},                  {"c", r.c},         {"sparsity", r.sparsity},
         {"parity_rows", r.parity_rows},  {"seed", r.seed}};
  if (r.mA) j["mA"] = *r.mA;
  return j;
}

EstimatorSpec parse_estimator(const json& j, bool allow_name) {
  if (allow_name) {
    check_object(j, "method", {"name", "estimator", "inner", "recovery", "tukey_dim_cap"});
  } else {
    check_object(j, "estimator spec", {"estimator", "inner", "recovery", "tukey_dim_cap"});
  }
  EstimatorSpec spec;
  spec.kind = parse_estimator_kind(require<std::string>(j, "estimator", "estimator spec"));
  if (j.contains("inner")) spec.inner = parse_estimator_kind(require<std::string>(j, "inner", "estimator spec"));
  if (j.contains("recovery")) spec.recovery = parse_recovery(j.at("recovery"));
  spec.tukey_dim_cap = get_or<Index>(j, "tukey_dim_cap", spec.tukey_dim_cap, "estimator spec");
  spec.validate();
  return spec;
}

json estimator_json(const EstimatorSpec& spec) {
  json j{{"estimator", to_string(spec.kind)}};
  if (spec.inner) j["inner"] = to_string(*spec.inner);
  if (spec.recovery) j["recovery"] = recovery_json(*spec.recovery);
  if (spec.kind == EstimatorKind::tukey_median_small) j["tukey_dim_cap"] = spec.tukey_dim_cap;
  return j;
}

StructureSpec parse_structure(const json& j, const std::filesystem::path& base) {
  check_object(j, "structure", {"kind", "n", "r", "blocks", "seed", "matrix", "path"});
  StructureSpec s;
  s.kind = parse_structure_kind(get_or<std::string>(j, "kind", "block_diagonal", "structure"));
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed, "structure");
  if (s.kind == StructureKind::explicit_matrix) {
    Matrix m;
    if (j.contains("path")) {
      m = csv::read_matrix(resolve(base, require<std::string>(j, "path", "structure")));
    } else {
      const auto rows = require<std::vector<std::vector<double>>>(j, "matrix", "structure");
      if (rows.empty() || rows.front().empty()) throw Error(Errc::config, "structure: empty matrix");
      m.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw Error(Errc::config, "structure: ragged matrix");
        for (std::size_t k = 0; k < rows[i].size(); ++k) m(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
      }
    }
    s.n = m.rows();
    s.r = m.cols();
    s.blocks.clear();
    s.explicit_entries = std::move(m);
  } else {
    s.n = get_or<Index>(j, "n", s.n, "structure");
    s.r = get_or<Index>(j, "r", s.r, "structure");
    if (j.contains("blocks")) {
      s.blocks.clear();
      for (const auto& b : get_or<std::vector<std::vector<Index>>>(j, "blocks", {}, "structure")) {
        if (b.size() != 2) throw Error(Errc::config, "structure: each block is [rows, cols]");
        s.blocks.emplace_back(b[0], b[1]);
      }
    } else if (s.kind != StructureKind::block_diagonal) {
      s.blocks.clear();
    }
  }
  s.validate();
  return s;
}

json structure_json(const StructureSpec& s) {
  json j{{"kind", to_string(s.kind)}, {"n", s.n}, {"r", s.r}, {"seed", s.seed}};
  if (s.kind == StructureKind::block_diagonal) {
    json blocks = json::array();
    for (const auto& [r, c] : s.blocks) blocks.push_back({r, c});
    j["blocks"] = blocks;
  }
  if (s.explicit_entries) {
    json rows = json::array();
    for (Index i = 0; i < s.explicit_entries->rows(); ++i) rows.push_back(vector_json(s.explicit_entries->row(i).transpose()));
    j["matrix"] = rows;
  }
  return j;
}

LatentSpec parse_latent(const json& j, Index r) {
  check_object(j, "latent", {"kind", "mean", "scale"});
  LatentSpec l;
  l.kind = parse_latent_kind(get_or<std::string>(j, "kind", "gaussian", "latent"));
  l.r = r;
  l.mean = vector_field(j, "mean", r, "latent");
  l.scale = vector_field(j, "scale", r, "latent");
  l.validate();
  return l;
}

json latent_json(const LatentSpec& l) {
  return json{{"kind", to_string(l.kind)}, {"mean", vector_json(l.mean_or_default())},
              {"scale", vector_json(l.scale_or_default())}};
}

}  // namespace

std::string_view to_string(AdversaryStrategy s) noexcept {
  switch (s) {
    case AdversaryStrategy::shift: return "shift";
    case AdversaryStrategy::tail_hiding: return "tail_hiding";
    case AdversaryStrategy::concentrate: return "concentrate";
    case AdversaryStrategy::unrecoverable: return "unrecoverable";
  }
  return "unknown";
}

AdversaryStrategy parse_adversary_strategy(std::string_view text) {
  for (auto s : {AdversaryStrategy::shift, AdversaryStrategy::tail_hiding, AdversaryStrategy::concentrate,
                 AdversaryStrategy::unrecoverable}) {
    if (text == to_string(s)) return s;
  }
  throw Error(Errc::config, "unknown adversary strategy '" + std::string(text) + "'");
}

std::string_view to_string(MetricKind m) noexcept { return m == MetricKind::l2 ? "l2" : "mahalanobis"; }

MetricKind parse_metric_kind(std::string_view text) {
  if (text == "l2") return MetricKind::l2;
  if (text == "mahalanobis") return MetricKind::mahalanobis;
  throw Error(Errc::config, "unknown metric '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw Error(Errc::config, "trials must be >= 1");
  if (threads < 1) throw Error(Errc::config, "threads must be >= 1");
  if (ithsvd_rank < 0) throw Error(Errc::config, "ithsvd_rank must be >= 0");
  for (std::size_t b = 0; b < adversary.budgets.size(); ++b) {
    const double v = adversary.budgets[b];
    if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::config, "budgets must lie in [0, 1]");
    if (b > 0 && !(v > adversary.budgets[b - 1])) throw Error(Errc::config, "budgets must be strictly increasing");
  }
  const bool strategy_fits = [&] {
    switch (adversary.strategy) {
      case AdversaryStrategy::shift: return adversary.kind == AdversaryKind::sample_level;
      case AdversaryStrategy::tail_hiding: return adversary.kind == AdversaryKind::value_fraction;
      case AdversaryStrategy::concentrate:
      case AdversaryStrategy::unrecoverable: return adversary.kind == AdversaryKind::coordinate_fraction;
    }
    return false;
  }();
  if (!strategy_fits) {
    throw Error(Errc::config, "strategy '" + std::string(to_string(adversary.strategy)) +
                                  "' does not belong to adversary kind '" + std::string(to_string(adversary.kind)) + "'");
  }
  if (methods.empty()) throw Error(Errc::config, "at least one method is required");
  if (metrics.empty()) throw Error(Errc::config, "at least one metric is required");
  std::set<std::string> names;
  bool needs_structure = adversary.strategy == AdversaryStrategy::unrecoverable && !adversary.mA;
  for (const auto& m : methods) {
    if (m.name.empty() || m.name.find_first_of(",\"\r\n") != std::string::npos) {
      throw Error(Errc::config, "method names must be nonempty and free of commas, quotes and newlines");
    }
    if (!names.insert(m.name).second) throw Error(Errc::config, "duplicate method name '" + m.name + "'");
    m.spec.validate();
    if (m.spec.recovery && m.spec.recovery->method != RecoveryMethod::ithsvd) needs_structure = true;
    if (m.spec.recovery && m.spec.recovery->method == RecoveryMethod::ithsvd && m.spec.recovery->rank == 0 &&
        ithsvd_rank == 0 && !synthetic()) {
      throw Error(Errc::config, "method '" + m.name + "' needs a rank: set recovery.rank or ithsvd_rank");
    }
  }
  if (const auto* src = std::get_if<CsvSource>(&data)) {
    if (needs_structure && !src->structure_path) {
      throw Error(Errc::config, "a method or adversary needs the structure matrix; set data.structure_path");
    }
  }
  std::set<MetricKind> seen;
  for (auto m : metrics) {
    if (!seen.insert(m).second) throw Error(Errc::config, "duplicate metric");
  }
}

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  const json root = parse_text(json_text);
  check_object(root, "config",
               {"seed", "data", "adversary", "methods", "metrics", "trials", "ithsvd_rank", "threads", "output"});
  ExperimentConfig cfg;
  cfg.seed = get_or<std::uint64_t>(root, "seed", cfg.seed, "config");
  cfg.trials = get_or<int>(root, "trials", cfg.trials, "config");
  cfg.ithsvd_rank = get_or<Index>(root, "ithsvd_rank", cfg.ithsvd_rank, "config");
  cfg.threads = get_or<int>(root, "threads", cfg.threads, "config");
  cfg.output = get_or<std::string>(root, "output", cfg.output, "config");

  if (!root.contains("data")) throw Error(Errc::config, "config: missing 'data'");
  const json& data = root.at("data");
  const std::string source = get_or<std::string>(data, "source", "synthetic", "data");
  if (source == "synthetic") {
    check_object(data, "data", {"source", "N", "structure", "latent"});
    SyntheticSource s;
    s.N = get_or<Index>(data, "N", s.N, "data");
    if (s.N < 1) throw Error(Errc::config, "data: N must be >= 1");
    s.structure = parse_structure(data.contains("structure") ? data.at("structure") : json::object(), base_dir);
    s.latent = parse_latent(data.contains("latent") ? data.at("latent") : json::object(), s.structure.r);
    cfg.data = std::move(s);
  } else if (source == "csv") {
    check_object(data, "data", {"source", "path", "header", "standardize", "structure_path"});
    CsvSource c;
    c.path = resolve(base_dir, require<std::string>(data, "path", "data"));
    c.has_header = get_or<bool>(data, "header", c.has_header, "data");
    c.standardize = get_or<bool>(data, "standardize", c.standardize, "data");
    if (data.contains("structure_path")) {
      c.structure_path = resolve(base_dir, require<std::string>(data, "structure_path", "data"));
    }
    cfg.data = std::move(c);
  } else {
    throw Error(Errc::config, "data: source must be 'synthetic' or 'csv'");
  }

  if (!root.contains("adversary")) throw Error(Errc::config, "config: missing 'adversary'");
  const json& adv = root.at("adversary");
  check_object(adv, "adversary", {"kind", "strategy", "budgets", "shift", "mA"});
  cfg.adversary.kind = parse_adversary_kind(require<std::string>(adv, "kind", "adversary"));
  switch (cfg.adversary.kind) {
    case AdversaryKind::sample_level: cfg.adversary.strategy = AdversaryStrategy::shift; break;
    case AdversaryKind::value_fraction: cfg.adversary.strategy = AdversaryStrategy::tail_hiding; break;
    case AdversaryKind::coordinate_fraction: cfg.adversary.strategy = AdversaryStrategy::concentrate; break;
  }
  if (adv.contains("strategy")) {
    cfg.adversary.strategy = parse_adversary_strategy(require<std::string>(adv, "strategy", "adversary"));
  }
  cfg.adversary.budgets = require<std::vector<double>>(adv, "budgets", "adversary");
  if (adv.contains("shift")) {
    const Index n = cfg.synthetic() ? std::get<SyntheticSource>(cfg.data).structure.n : 0;
    if (adv.at("shift").is_number() && n == 0) {
      throw Error(Errc::config, "adversary: a scalar shift needs a synthetic source; give a list");
    }
    cfg.adversary.shift = vector_field(adv, "shift", n, "adversary");
  }
  if (adv.contains("mA")) cfg.adversary.mA = get_or<Index>(adv, "mA", 0, "adversary");

  if (!root.contains("methods") || !root.at("methods").is_array()) {
    throw Error(Errc::config, "config: 'methods' must be a list");
  }
  for (const json& m : root.at("methods")) {
    MethodConfig mc;
    mc.spec = parse_estimator(m, true);
    mc.name = get_or<std::string>(m, "name", std::string(to_string(mc.spec.kind)), "method");
    cfg.methods.push_back(std::move(mc));
  }
  if (root.contains("metrics")) {
    cfg.metrics.clear();
    for (const auto& name : get_or<std::vector<std::string>>(root, "metrics", {}, "config")) {
      cfg.metrics.push_back(parse_metric_kind(name));
    }
  }
  cfg.validate();

  json echo{{"seed", cfg.seed},
            {"trials", cfg.trials},
            {"ithsvd_rank", cfg.ithsvd_rank},
            {"threads", cfg.threads},
            {"output", cfg.output}};
  if (const auto* s = std::get_if<SyntheticSource>(&cfg.data)) {
    echo["data"] = {{"source", "synthetic"},
                    {"N", s->N},
                    {"structure", structure_json(s->structure)},
                    {"latent", latent_json(s->latent)}};
  } else {
    const auto& c = std::get<CsvSource>(cfg.data);
    echo["data"] = {{"source", "csv"},
                    {"path", c.path.string()},
                    {"header", c.has_header},
                    {"standardize", c.standardize}};
    if (c.structure_path) echo["data"]["structure_path"] = c.structure_path->string();
  }
  json adv_echo{{"kind", to_string(cfg.adversary.kind)},
                {"strategy", to_string(cfg.adversary.strategy)},
                {"budgets", cfg.adversary.budgets}};
  if (cfg.adversary.shift.size() > 0) adv_echo["shift"] = vector_json(cfg.adversary.shift);
  if (cfg.adversary.mA) adv_echo["mA"] = *cfg.adversary.mA;
  echo["adversary"] = adv_echo;
  json methods = json::array();
  for (const auto& m : cfg.methods) {
    json mj = estimator_json(m.spec);
    mj["name"] = m.name;
    methods.push_back(mj);
  }
  echo["methods"] = methods;
  json metrics = json::array();
  for (auto m : cfg.metrics) metrics.push_back(to_string(m));
  echo["metrics"] = metrics;
  cfg.json = echo.dump();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str(), path.parent_path());
}

EstimatorSpec parse_estimator_spec(std::string_view json_text) { return parse_estimator(parse_text(json_text), false); }

StructureSpec parse_structure_spec(std::string_view json_text, const std::filesystem::path& base_dir) {
  return parse_structure(parse_text(json_text), base_dir);
}

LatentSpec parse_latent_spec(std::string_view json_text, Index r) { return parse_latent(parse_text(json_text), r); }

std::string estimator_spec_json(const EstimatorSpec& spec) { return estimator_json(spec).dump(); }

}  // namespace robustmean
