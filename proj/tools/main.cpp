// robustmean command-line front end. Every subcommand reads one JSON config
// and writes files under the --out prefix; see docs/config.md.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "robustmean/config.hpp"
#include "robustmean/corruption.hpp"
#include "robustmean/csv.hpp"
#include "robustmean/datagen.hpp"
#include "robustmean/error.hpp"
#include "robustmean/estimators.hpp"
#include "robustmean/experiment.hpp"
#include "robustmean/metrics.hpp"
#include "robustmean/recovery.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace robustmean;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
};

struct LoadedConfig {
  json body;
  fs::path dir;
};

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return {json::parse(buffer.str()), fs::path(path).parent_path()};
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, std::string("invalid JSON in ") + path + ": " + e.what());
  }
}

fs::path resolve(const fs::path& dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || dir.empty() ? path : dir / path;
}

std::string field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw Error(Errc::config, std::string("config needs a string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

std::string out_prefix(const Options& opt, const json& body, const char* fallback) {
  if (!opt.out.empty()) return opt.out;
  if (body.contains("output") && body.at("output").is_string()) return body.at("output").get<std::string>();
  return fallback;
}

std::uint64_t seed_of(const Options& opt, const json& body) {
  if (opt.seed) return *opt.seed;
  return body.contains("seed") ? body.at("seed").get<std::uint64_t>() : 0;
}

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const json& j, const fs::path& dir, const char* key) {
  if (!j.contains(key)) throw Error(Errc::config, std::string("config needs '") + key + "'");
  const json& v = j.at(key);
  if (v.is_string()) {
    const Matrix m = csv::read_matrix(resolve(dir, v.get<std::string>()));
    if (m.rows() != 1 && m.cols() != 1) throw Error(Errc::config, std::string(key) + " must hold a single row or column");
    return Eigen::Map<const Vector>(m.data(), m.size());
  }
  const auto values = v.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Matrix matrix_from(const json& j, const fs::path& dir, const char* key) {
  if (!j.contains(key)) throw Error(Errc::config, std::string("config needs '") + key + "'");
  const json& v = j.at(key);
  if (v.is_string()) return csv::read_matrix(resolve(dir, v.get<std::string>()));
  const auto rows = v.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw Error(Errc::config, std::string(key) + " is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw Error(Errc::config, std::string(key) + " is ragged");
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
  }
  return m;
}

Dataset dataset_from(const json& body, const fs::path& dir) {
  const bool header = body.value("header", false);
  return Dataset::read_csv(resolve(dir, field(body, "data")), header);
}

std::optional<StructureMatrix> structure_from(const json& body, const fs::path& dir) {
  if (!body.contains("structure")) return std::nullopt;
  return StructureMatrix::load_csv(resolve(dir, field(body, "structure")));
}

void write_json(const fs::path& path, const json& j) {
  auto out = csv::open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(Errc::io, "failed writing " + path.string());
}

// ---------------------------------------------------------------------------

int cmd_gen(const Options& opt) {
  const auto [body, dir] = load_config(opt.config);
  const StructureSpec sspec = parse_structure_spec(body.contains("structure") ? body.at("structure").dump() : "{}", dir);
  const LatentSpec lspec = parse_latent_spec(body.contains("latent") ? body.at("latent").dump() : "{}", sspec.r);
  const Index N = body.value("N", Index{1000});
  const StructureMatrix a = gen_structure(sspec);
  Rng rng(seed_of(opt, body));
  const Dataset ds = gen_dataset(a, gen_latents(lspec, N, rng));
  const std::string prefix = out_prefix(opt, body, "gen");
  ds.write_csv(fs::path(prefix + ".data.csv"));
  a.save_csv(prefix + ".structure.csv");
  csv::write_matrix(prefix + ".mean.csv", true_mean(a, lspec).transpose());
  std::cout << "wrote " << prefix << ".{data,structure,mean}.csv (" << N << " samples, n = " << a.n() << ")\n";
  return 0;
}

int cmd_corrupt(const Options& opt) {
  const auto [body, dir] = load_config(opt.config);
  const Dataset ds = dataset_from(body, dir);
  if (!body.contains("adversary")) throw Error(Errc::config, "config needs 'adversary'");
  const json& adv = body.at("adversary");
  const AdversaryKind kind = parse_adversary_kind(field(adv, "kind"));
  AdversaryStrategy strategy = kind == AdversaryKind::sample_level     ? AdversaryStrategy::shift
                               : kind == AdversaryKind::value_fraction ? AdversaryStrategy::tail_hiding
                                                                       : AdversaryStrategy::concentrate;
  if (adv.contains("strategy")) strategy = parse_adversary_strategy(field(adv, "strategy"));
  if (!adv.contains("budget") || !adv.at("budget").is_number()) throw Error(Errc::config, "adversary needs a numeric 'budget'");
  const double budget = Budget(kind, adv.at("budget").get<double>()).value;
  Rng rng(seed_of(opt, body));

  CorruptionPlan plan;
  switch (strategy) {
    case AdversaryStrategy::shift: {
      Vector shift;
      if (adv.contains("shift")) {
        shift = adv.at("shift").is_number() ? Vector::Constant(ds.n(), adv.at("shift").get<double>())
                                            : vector_from(adv, dir, "shift");
      }
      plan = plan_A1(ds, budget, rng, shift);
      break;
    }
    case AdversaryStrategy::tail_hiding: plan = plan_A2_tail_hiding(ds, budget); break;
    case AdversaryStrategy::concentrate: plan = plan_A3_concentrate(ds, budget); break;
    case AdversaryStrategy::unrecoverable: {
      Index mA = 0;
      if (adv.contains("mA")) {
        mA = adv.at("mA").get<Index>();
      } else if (auto a = structure_from(body, dir)) {
        mA = compute_mA_exact(*a);
      } else {
        throw Error(Errc::config, "the unrecoverable strategy needs adversary.mA or a structure path");
      }
      plan = plan_A3_unrecoverable(ds, budget, mA, rng);
      break;
    }
  }
  const Dataset corrupted = apply_plan(ds, plan);
  const std::string prefix = out_prefix(opt, body, "corrupt");
  corrupted.write_csv(fs::path(prefix + ".data.csv"));
  plan.write_csv(fs::path(prefix + ".plan.csv"));
  std::cout << "corrupted " << plan.size() << " cells; spent " << budget_of_plan(plan, kind, ds.N(), ds.n()) << " of "
            << to_string(kind) << " budget " << budget << '\n';
  return 0;
}

int cmd_recover(const Options& opt) {
  const auto [body, dir] = load_config(opt.config);
  const Dataset ds = dataset_from(body, dir);
  const auto a = structure_from(body, dir);
  if (!body.contains("recovery")) throw Error(Errc::config, "config needs 'recovery'");
  // Reuse the estimator-spec parser to validate the recovery block.
  const json wrapped{{"estimator", "two_step"}, {"inner", "empirical_mean"}, {"recovery", body.at("recovery")}};
  RecoverySpec rec = *parse_estimator_spec(wrapped.dump()).recovery;
  if (opt.seed) rec.seed = *opt.seed;
  const std::string prefix = out_prefix(opt, body, "recover");

  json report;
  Dataset out = ds;
  if (rec.method == RecoveryMethod::ithsvd) {
    IthsvdOptions io;
    io.target_rank = rec.rank > 0 ? rec.rank : (a ? a->rank() : 0);
    if (io.target_rank < 1) throw Error(Errc::config, "ithsvd needs recovery.rank or a structure path");
    io.max_iter = rec.max_iter;
    io.tol = rec.tol;
    CompletionReport cr = ithsvd_complete(ds, io);
    report = json::parse(cr.to_json());
    out = std::move(cr.completed);
  } else {
    if (!a) throw Error(Errc::config, std::string(to_string(rec.method)) + " needs a structure path");
    Rng rng(rec.seed);
    const Index parity = rec.parity_rows > 0 ? rec.parity_rows : a->n() - a->rank();
    json recovered = json::array();
    json discarded = json::array();
    json residuals = json::object();
    for (Index i = 0; i < ds.N(); ++i) {
      RecoveryOutcome o;
      if (rec.method == RecoveryMethod::known_structure) {
        if (ds.sample_complete(i)) continue;
        o = impute_known_structure(ds.sample(i), ds.sample_mask(i), *a);
      } else {
        if (!ds.sample_complete(i)) throw Error(Errc::invalid_argument, "replacement recovery needs fully observed data");
        if (rec.method == RecoveryMethod::replacement_randomized) {
          o = recover_replacement_randomized(*a, ds.sample(i), rec.c, rng);
        } else if (rec.method == RecoveryMethod::replacement_bruteforce) {
          o = recover_replacement_bruteforce(*a, ds.sample(i));
        } else {
          o = recover_via_sparse(*a, ds.sample(i), rec.sparsity, parity, rng);
        }
      }
      if (o.status == RecoveryStatus::unrecoverable) {
        discarded.push_back(i);
      } else if (o.status == RecoveryStatus::recovered) {
        recovered.push_back(i);
        for (Index j = 0; j < ds.n(); ++j) out.set(i, j, (*o.sample)(j));
        if (o.residual_hamming > 0) residuals[std::to_string(i)] = o.residual_hamming;
      }
    }
    report = {{"method", to_string(rec.method)}, {"recovered_indices", recovered},
              {"discarded_indices", discarded}, {"residual_hamming", residuals}};
  }
  out.write_csv(fs::path(prefix + ".data.csv"));
  write_json(prefix + ".report.json", report);
  std::cout << "recovered " << report["recovered_indices"].size() << " samples, discarded "
            << report["discarded_indices"].size() << '\n';
  return 0;
}

int cmd_estimate(const Options& opt) {
  const auto [body, dir] = load_config(opt.config);
  const Dataset ds = dataset_from(body, dir);
  const auto a = structure_from(body, dir);
  if (!body.contains("estimator")) throw Error(Errc::config, "config needs 'estimator'");
  EstimatorSpec spec = parse_estimator_spec(body.at("estimator").dump());
  if (spec.recovery && opt.seed) spec.recovery->seed = *opt.seed;
  json result{{"estimator", json::parse(estimator_spec_json(spec))}};
  if (spec.kind == EstimatorKind::two_step) {
    const TwoStepResult r = two_step_estimate_detailed(ds, a ? &*a : nullptr, spec);
    result["estimate"] = vec_json(r.estimate);
    result["recovered_indices"] = r.recovered;
    result["discarded_indices"] = r.discarded;
  } else {
    result["estimate"] = vec_json(estimate(ds, spec, a ? &*a : nullptr));
  }
  const std::string prefix = out_prefix(opt, body, "estimate");
  write_json(prefix + ".json", result);
  std::cout << result["estimate"].dump() << '\n';
  return 0;
}

int cmd_metric(const Options& opt) {
  const auto [body, dir] = load_config(opt.config);
  const std::string metric = field(body, "metric");
  double value = 0.0;
  json extra = json::object();
  if (metric == "l2") {
    value = l2_error(vector_from(body, dir, "estimate"), vector_from(body, dir, "reference"));
  } else if (metric == "mahalanobis") {
    value = mahalanobis_error(vector_from(body, dir, "estimate"), vector_from(body, dir, "reference"),
                              matrix_from(body, dir, "sigma"));
  } else if (metric == "tv" || metric == "d_entry_1" || metric == "d_entry_inf") {
    const bool header = body.value("header", true);
    const auto p = DiscreteDistribution::load_csv(resolve(dir, field(body, "p")), header);
    const auto q = DiscreteDistribution::load_csv(resolve(dir, field(body, "q")), header);
    if (metric == "tv") {
      value = tv_distance(p, q);
    } else if (metric == "d_entry_1") {
      const EntryDistance d = d_entry_1(p, q);
      value = d.value;
      json rows = json::array();
      for (Index i = 0; i < d.coupling.matrix.rows(); ++i) rows.push_back(vec_json(d.coupling.matrix.row(i).transpose()));
      extra["coupling"] = rows;
    } else {
      value = d_entry_inf(p, q);
    }
  } else if (metric == "disc") {
    value = disc(matrix_from(body, dir, "matrix"), body.value("n_cap", Index{20}));
  } else {
    throw Error(Errc::config, "unknown metric '" + metric + "'");
  }
  json result{{"metric", metric}, {"value", value}};
  result.update(extra);
  const std::string prefix = out_prefix(opt, body, "metric");
  write_json(prefix + ".json", result);
  std::cout << metric << " = " << csv::format_double(value) << '\n';
  return 0;
}

int cmd_experiment(const Options& opt) {
  ExperimentConfig cfg = load_experiment_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  if (!opt.out.empty()) cfg.output = opt.out;
  cfg.validate();
  const ExperimentResult res = run_experiment(cfg);
  emit_results(res, cfg.output);
  std::cout << "wrote " << res.rows.size() << " rows to " << cfg.output << ".csv\n";
  for (const auto& cell : res.summary()) {
    std::cout << "  " << cell.method << " budget=" << cell.budget << ' ' << to_string(cell.metric) << " mean=";
    if (cell.count > 0) {
      std::cout << cell.mean;
    } else {
      std::cout << "NA";
    }
    std::cout << " (n=" << cell.count << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust mean estimation under coordinate-level corruption"};
  app.require_subcommand(1);
  Options opt;

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Sub subs[] = {
      {"gen", "generate a structured synthetic dataset", cmd_gen},
      {"corrupt", "apply an adversary plan to a dataset", cmd_corrupt},
      {"recover", "recover hidden or replaced entries", cmd_recover},
      {"estimate", "run one mean estimator", cmd_estimate},
      {"metric", "compute an error metric or distribution distance", cmd_metric},
      {"experiment", "run a corruption sweep and emit per-trial results", cmd_experiment},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", opt.config, "JSON config file")->required();
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--out", opt.out, "output path prefix");
    sub->add_option("--threads", opt.threads, "worker threads (experiment)")->check(CLI::PositiveNumber);
    sub->callback([&selected, run = s.run] { selected = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return selected(opt);
  } catch (const Error& e) {
    std::cerr << "robustmean: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == Errc::io ? 2 : 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "robustmean: config: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "robustmean: " << e.what() << '\n';
    return 1;
  }
}
