#include "robustmean/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "robustmean/corruption.hpp"
#include "robustmean/csv.hpp"
#include "robustmean/datagen.hpp"
#include "robustmean/error.hpp"
#include "robustmean/estimators.hpp"
#include "robustmean/metrics.hpp"

namespace robustmean {
namespace {

constexpr std::uint64_t kAdversaryTag = 0x61647673ULL;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Rng derived_rng(std::uint64_t trial_seed, std::size_t budget_index, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(trial_seed), static_cast<std::uint32_t>(trial_seed >> 32),
                    static_cast<std::uint32_t>(budget_index), static_cast<std::uint32_t>(tag),
                    static_cast<std::uint32_t>(tag >> 32)};
  return Rng(seq);
}

// Population covariance over the fully observed samples.
std::optional<Matrix> empirical_covariance(const Dataset& ds) {
  IndexList complete;
  for (Index i = 0; i < ds.N(); ++i) {
    if (ds.sample_complete(i)) complete.push_back(i);
  }
  if (complete.size() < 2) return std::nullopt;
  const Matrix x = ds.select_samples(complete).values();
  const Matrix centered = x.rowwise() - x.colwise().mean();
  return Matrix(centered.transpose() * centered / static_cast<double>(x.rows()));
}

struct TrialContext {
  const ExperimentConfig* cfg = nullptr;
  const StructureMatrix* a = nullptr;
  const Dataset* csv_clean = nullptr;
  const Vector* csv_reference = nullptr;
  const std::optional<Matrix>* csv_sigma = nullptr;
  std::optional<Index> adversary_mA;
};

CorruptionPlan make_plan(const TrialContext& ctx, const Dataset& clean, double budget, Rng& rng) {
  const AdversarySpec& adv = ctx.cfg->adversary;
  switch (adv.strategy) {
    case AdversaryStrategy::shift: return plan_A1(clean, budget, rng, adv.shift);
    case AdversaryStrategy::tail_hiding: return plan_A2_tail_hiding(clean, budget);
    case AdversaryStrategy::concentrate: return plan_A3_concentrate(clean, budget);
    case AdversaryStrategy::unrecoverable: return plan_A3_unrecoverable(clean, budget, *ctx.adversary_mA, rng);
  }
  throw Error(Errc::internal, "unhandled adversary strategy");
}

// values[method][budget][metric]
using TrialValues = std::vector<std::vector<std::vector<std::optional<double>>>>;

TrialValues run_trial(const TrialContext& ctx, int trial) {
  const ExperimentConfig& cfg = *ctx.cfg;
  const std::uint64_t trial_seed = cfg.seed + static_cast<std::uint64_t>(trial);

  Dataset clean;
  Vector reference;
  std::optional<Matrix> sigma;
  if (const auto* src = std::get_if<SyntheticSource>(&cfg.data)) {
    Rng rng(trial_seed);
    clean = gen_dataset(*ctx.a, gen_latents(src->latent, src->N, rng));
    reference = true_mean(*ctx.a, src->latent);
    sigma = population_covariance(*ctx.a, src->latent);
  } else {
    clean = *ctx.csv_clean;
    reference = *ctx.csv_reference;
    sigma = *ctx.csv_sigma;
  }

  const auto& budgets = cfg.adversary.budgets;
  TrialValues values(cfg.methods.size(),
                     std::vector<std::vector<std::optional<double>>>(
                         budgets.size(), std::vector<std::optional<double>>(cfg.metrics.size())));
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    Rng plan_rng = derived_rng(trial_seed, b, kAdversaryTag);
    const Dataset corrupted = apply_plan(clean, make_plan(ctx, clean, budgets[b], plan_rng));

    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      EstimatorSpec spec = cfg.methods[m].spec;
      if (spec.recovery) {
        Rng method_rng = derived_rng(trial_seed, b, fnv1a(cfg.methods[m].name) ^ spec.recovery->seed);
        spec.recovery->seed = method_rng();
        if (spec.recovery->method == RecoveryMethod::ithsvd && spec.recovery->rank == 0) {
          spec.recovery->rank = cfg.ithsvd_rank;
        }
      }
      std::optional<Vector> mu_hat;
      try {
        mu_hat = estimate(corrupted, spec, ctx.a);
      } catch (const Error& e) {
        if (e.code() == Errc::internal) throw;
      }
      if (!mu_hat) continue;
      for (std::size_t k = 0; k < cfg.metrics.size(); ++k) {
        try {
          if (cfg.metrics[k] == MetricKind::l2) {
            values[m][b][k] = l2_error(*mu_hat, reference);
          } else if (sigma) {
            values[m][b][k] = mahalanobis_error(*mu_hat, reference, *sigma);
          }
        } catch (const Error& e) {
          if (e.code() == Errc::internal) throw;
        }
      }
    }
  }
  return values;
}

std::string metric_text(MetricKind m) { return std::string(to_string(m)); }

}  // namespace

Dataset ingest_csv(std::istream& in, bool standardize, bool has_header) {
  Dataset ds = Dataset::read_csv(in, has_header);
  if (!standardize) return ds;
  for (Index j = 0; j < ds.n(); ++j) {
    const auto col = ds.visible_column(j);
    if (col.empty()) continue;
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(col.size());
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= static_cast<double>(col.size());
    const double sd = std::sqrt(var);
    for (Index i = 0; i < ds.N(); ++i) {
      if (ds.missing(i, j)) continue;
      const double centered = ds.value(i, j) - mean;
      ds.set(i, j, sd > 0.0 ? centered / sd : centered);
    }
  }
  return ds;
}

Dataset ingest_csv(const std::filesystem::path& path, bool standardize, bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  return ingest_csv(in, standardize, has_header);
}

Vector reference_mean(const Dataset& clean) { return empirical_mean(clean); }

std::vector<SummaryCell> ExperimentResult::summary() const {
  std::vector<SummaryCell> cells;
  std::map<std::tuple<std::string, double, int>, std::size_t> index;
  std::vector<std::vector<double>> samples;
  for (const auto& row : rows) {
    const auto key = std::make_tuple(row.method, row.budget, static_cast<int>(row.metric));
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, cells.size()).first;
      cells.push_back({row.method, row.budget, row.metric, 0, 0.0, 0.0});
      samples.emplace_back();
    }
    if (row.value) samples[it->second].push_back(*row.value);
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& v = samples[c];
    cells[c].count = v.size();
    if (v.empty()) {
      cells[c].mean = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    cells[c].mean = mean;
    cells[c].sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  }
  return cells;
}

std::optional<double> ExperimentResult::mean_of(const std::string& method, double budget, MetricKind metric) const {
  for (const auto& cell : summary()) {
    if (cell.method == method && cell.budget == budget && cell.metric == metric && cell.count > 0) return cell.mean;
  }
  return std::nullopt;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  TrialContext ctx;
  ctx.cfg = &cfg;

  std::optional<StructureMatrix> a;
  Dataset csv_clean;
  Vector csv_reference;
  std::optional<Matrix> csv_sigma;
  if (const auto* src = std::get_if<SyntheticSource>(&cfg.data)) {
    a = gen_structure(src->structure);
  } else {
    const auto& c = std::get<CsvSource>(cfg.data);
    csv_clean = ingest_csv(c.path, c.standardize, c.has_header);
    if (c.structure_path) a = StructureMatrix::load_csv(*c.structure_path);
    if (a && a->n() != csv_clean.n()) {
      throw Error(Errc::config, "structure matrix rows differ from the CSV's column count");
    }
    csv_reference = reference_mean(csv_clean);
    csv_sigma = empirical_covariance(csv_clean);
    ctx.csv_clean = &csv_clean;
    ctx.csv_reference = &csv_reference;
    ctx.csv_sigma = &csv_sigma;
  }
  if (a) ctx.a = &*a;
  if (cfg.adversary.strategy == AdversaryStrategy::unrecoverable) {
    ctx.adversary_mA = cfg.adversary.mA ? *cfg.adversary.mA : compute_mA_exact(*a);
  }

  std::vector<TrialValues> per_trial(static_cast<std::size_t>(cfg.trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= cfg.trials) return;
      try {
        per_trial[static_cast<std::size_t>(t)] = run_trial(ctx, t);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(cfg.trials);
      }
    }
  };
  const int workers = std::min(cfg.threads, cfg.trials);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult res;
  res.config_json = cfg.json;
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    for (std::size_t b = 0; b < cfg.adversary.budgets.size(); ++b) {
      for (int t = 0; t < cfg.trials; ++t) {
        for (std::size_t k = 0; k < cfg.metrics.size(); ++k) {
          res.rows.push_back({cfg.methods[m].name, cfg.adversary.budgets[b], t, cfg.metrics[k],
                              per_trial[static_cast<std::size_t>(t)][m][b][k]});
        }
      }
    }
  }
  return res;
}

void write_results_csv(std::ostream& out, const ExperimentResult& res) {
  out << "method,budget,trial,metric,value\n";
  for (const auto& row : res.rows) {
    out << row.method << ',' << csv::format_double(row.budget) << ',' << row.trial << ',' << metric_text(row.metric)
        << ',' << (row.value ? csv::format_double(*row.value) : std::string("NA")) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 0;
  auto number = [&](const std::string& cell, std::size_t col) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) throw ParseError("bad number '" + cell + "'", line_no, col);
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "method,budget,trial,metric,value") throw ParseError("unexpected results header", 1, 1);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 5) throw ParseError("expected 5 cells", line_no, cells.size() + 1);
    ResultRow row;
    row.method = cells[0];
    row.budget = number(cells[1], 2);
    row.trial = static_cast<int>(number(cells[2], 3));
    row.metric = parse_metric_kind(cells[3]);
    if (cells[4] != "NA") row.value = number(cells[4], 5);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summary_json(const ExperimentResult& res) {
  using nlohmann::json;
  json cells = json::array();
  for (const auto& c : res.summary()) {
    json j{{"method", c.method}, {"budget", c.budget}, {"metric", metric_text(c.metric)}, {"count", c.count}};
    j["mean"] = c.count > 0 ? json(c.mean) : json(nullptr);
    j["sd"] = c.count > 0 ? json(c.sd) : json(nullptr);
    cells.push_back(j);
  }
  json root{{"summary", cells}};
  root["config"] = res.config_json.empty() ? json::object() : json::parse(res.config_json);
  return root.dump(2);
}

void emit_results(const ExperimentResult& res, const std::filesystem::path& prefix) {
  {
    auto out = csv::open_output(prefix.string() + ".csv");
    write_results_csv(out, res);
    if (!out) throw Error(Errc::io, "failed writing " + prefix.string() + ".csv");
  }
  auto out = csv::open_output(prefix.string() + ".summary.json");
  out << summary_json(res) << '\n';
  if (!out) throw Error(Errc::io, "failed writing " + prefix.string() + ".summary.json");
}

}  // namespace robustmean
