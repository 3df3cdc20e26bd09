#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

#include "robustmean/error.hpp"
#include "robustmean/estimators.hpp"
#include "robustmean/experiment.hpp"

using namespace robustmean;

namespace {

std::string small_config(const std::string& budgets, const std::string& methods, int trials = 2) {
  return R"({
    "seed": 5, "trials": )" + std::to_string(trials) + R"(, "ithsvd_rank": 2,
    "data": {"source": "synthetic", "N": 200,
             "structure": {"kind": "dense_random", "n": 6, "r": 2, "seed": 3},
             "latent": {"kind": "gaussian", "mean": [1.0, -1.0], "scale": 1.0}},
    "adversary": {"kind": "value_fraction", "strategy": "tail_hiding", "budgets": )" + budgets + R"(},
    "methods": )" + methods + R"(,
    "metrics": ["l2", "mahalanobis"]
  })";
}

const std::string kMethods = R"([
  {"name": "Mean", "estimator": "empirical_mean"},
  {"name": "Median", "estimator": "coordinate_median"},
  {"name": "Sanitized", "estimator": "sanitized_mean"},
  {"name": "Known", "estimator": "two_step", "inner": "empirical_mean", "recovery": {"method": "known_structure"}},
  {"name": "Completion", "estimator": "two_step", "inner": "coordinate_median", "recovery": {"method": "ithsvd"}}
])";

const std::string kMethodsReversed = R"([
  {"name": "Completion", "estimator": "two_step", "inner": "coordinate_median", "recovery": {"method": "ithsvd"}},
  {"name": "Known", "estimator": "two_step", "inner": "empirical_mean", "recovery": {"method": "known_structure"}},
  {"name": "Sanitized", "estimator": "sanitized_mean"},
  {"name": "Median", "estimator": "coordinate_median"},
  {"name": "Mean", "estimator": "empirical_mean"}
])";

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_results_csv(out, r);
  return out.str();
}

Errc config_error(const std::string& text) {
  try {
    (void)parse_experiment_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "config accepted";
  return Errc::internal;
}

}  // namespace

TEST(Ingest, Examples) {
  std::istringstream plain("1,2\n3,4\n");
  const Dataset a = ingest_csv(plain, false);
  EXPECT_EQ(a.N(), 2);
  EXPECT_FALSE(a.has_missing());
  EXPECT_EQ(a.value(1, 0), 3.0);

  std::istringstream gap("1,\n3,4\n");
  const Dataset b = ingest_csv(gap, false);
  EXPECT_TRUE(b.missing(0, 1));
  EXPECT_FALSE(b.missing(1, 1));
}

TEST(Ingest, Standardize) {
  std::istringstream in("1,5,7\n2,,7\n4,9,7\n10,1,7\n");
  const Dataset ds = ingest_csv(in, true);
  for (Index j = 0; j < ds.n(); ++j) {
    const auto col = ds.visible_column(j);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(col.size());
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= static_cast<double>(col.size());
    EXPECT_LE(std::abs(mean), 1e-9);
    if (j < 2) {
      EXPECT_NEAR(std::sqrt(var), 1.0, 1e-9);
    } else {
      EXPECT_EQ(var, 0.0);
    }
  }
  EXPECT_TRUE(ds.missing(1, 1));
}

TEST(Ingest, ParseErrorsCarryLocation) {
  std::istringstream in("1,2\n3,x\n");
  try {
    (void)ingest_csv(in, false);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), 2u);
  }
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(ingest_csv(ragged, false), Error);
}

TEST(ReferenceMean, MatchesEmpiricalMean) {
  std::istringstream in("1,2\n3,4\n");
  const Dataset ds = ingest_csv(in, false);
  EXPECT_EQ(reference_mean(ds), empirical_mean(ds));
  EXPECT_EQ(reference_mean(ds), (Vector(2) << 2, 3).finished());
}

TEST(RunExperiment, RowCountAndOrder) {
  const auto cfg = parse_experiment_config(small_config("[0.0, 0.1]", kMethods, 3));
  const auto res = run_experiment(cfg);
  ASSERT_EQ(res.rows.size(), 5u * 2u * 3u * 2u);
  EXPECT_EQ(res.rows.front().method, "Mean");
  EXPECT_EQ(res.rows.back().method, "Completion");
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    const auto& a = res.rows[i - 1];
    const auto& b = res.rows[i];
    if (a.method == b.method) {
      EXPECT_TRUE(std::tie(a.budget, a.trial) <= std::tie(b.budget, b.trial));
    }
  }
  for (const auto& row : res.rows) {
    if (row.value) EXPECT_GE(*row.value, 0.0);
  }
}

TEST(RunExperiment, ZeroBudgetMatchesCleanError) {
  auto cfg = parse_experiment_config(small_config("[0.0]", kMethods, 1));
  std::get<SyntheticSource>(cfg.data).N = 50000;
  const auto res = run_experiment(cfg);
  const auto mean = res.mean_of("Mean", 0.0, MetricKind::l2);
  ASSERT_TRUE(mean.has_value());
  EXPECT_LT(*mean, 0.05);
  EXPECT_NEAR(*res.mean_of("Known", 0.0, MetricKind::l2), *mean, 1e-9);
  EXPECT_NEAR(*res.mean_of("Sanitized", 0.0, MetricKind::l2), *mean, 1e-9);
}

TEST(RunExperiment, Deterministic) {
  const auto cfg = parse_experiment_config(small_config("[0.05, 0.2]", kMethods));
  EXPECT_EQ(csv_of(run_experiment(cfg)), csv_of(run_experiment(cfg)));
  auto threaded = cfg;
  threaded.threads = 3;
  EXPECT_EQ(csv_of(run_experiment(cfg)), csv_of(run_experiment(threaded)));
}

TEST(RunExperiment, MethodOrderDoesNotMatter) {
  const auto a = run_experiment(parse_experiment_config(small_config("[0.05, 0.2]", kMethods)));
  const auto b = run_experiment(parse_experiment_config(small_config("[0.05, 0.2]", kMethodsReversed)));
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (const auto& row : a.rows) {
    const auto it = std::find_if(b.rows.begin(), b.rows.end(), [&](const ResultRow& r) {
      return r.method == row.method && r.budget == row.budget && r.trial == row.trial && r.metric == row.metric;
    });
    ASSERT_NE(it, b.rows.end());
    EXPECT_EQ(it->value, row.value);
  }
}

TEST(RunExperiment, TrialsAreStableWhenTheCountGrows) {
  const auto two = run_experiment(parse_experiment_config(small_config("[0.1]", kMethods, 2)));
  const auto three = run_experiment(parse_experiment_config(small_config("[0.1]", kMethods, 3)));
  for (const auto& row : two.rows) {
    const auto it = std::find_if(three.rows.begin(), three.rows.end(), [&](const ResultRow& r) {
      return r.method == row.method && r.trial == row.trial && r.metric == row.metric;
    });
    ASSERT_NE(it, three.rows.end());
    EXPECT_EQ(it->value, row.value);
  }
}

TEST(RunExperiment, FailuresBecomeNA) {
  // Hiding every value leaves nothing for any method to work with.
  const auto res = run_experiment(parse_experiment_config(small_config("[0.0, 1.0]", kMethods, 1)));
  for (const auto& row : res.rows) {
    if (row.metric == MetricKind::l2) EXPECT_EQ(row.value.has_value(), row.budget == 0.0) << row.method;
  }
  for (const auto& cell : res.summary()) {
    if (cell.metric != MetricKind::l2) continue;
    if (cell.budget == 1.0) {
      EXPECT_EQ(cell.count, 0u);
      EXPECT_TRUE(std::isnan(cell.mean));
    } else {
      EXPECT_EQ(cell.count, 1u);
      EXPECT_EQ(cell.sd, 0.0);
    }
  }
}

TEST(EmitResults, EmptyGridWritesHeaderOnly) {
  const auto res = run_experiment(parse_experiment_config(small_config("[]", kMethods)));
  EXPECT_TRUE(res.rows.empty());
  EXPECT_EQ(csv_of(res), "method,budget,trial,metric,value\n");
}

TEST(EmitResults, CsvRoundTrip) {
  const auto res = run_experiment(parse_experiment_config(small_config("[0.05, 0.5]", kMethods)));
  std::istringstream in(csv_of(res));
  EXPECT_EQ(read_results_csv(in), res.rows);
}

TEST(EmitResults, WritesBothFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "robustmean_emit_test";
  std::filesystem::create_directories(dir);
  const auto res = run_experiment(parse_experiment_config(small_config("[0.1]", kMethods, 1)));
  emit_results(res, dir / "run");
  std::ifstream csv(dir / "run.csv");
  std::ifstream summary(dir / "run.summary.json");
  ASSERT_TRUE(csv.good());
  ASSERT_TRUE(summary.good());
  std::stringstream s;
  s << summary.rdbuf();
  EXPECT_NE(s.str().find("\"config\""), std::string::npos);
  EXPECT_NE(s.str().find("\"summary\""), std::string::npos);
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(emit_results(res, dir / "file" / "run"), Error);
  std::filesystem::remove_all(dir);
}

TEST(Config, Errors) {
  EXPECT_EQ(config_error("{"), Errc::parse);
  EXPECT_EQ(config_error(small_config("[0.2, 0.1]", kMethods)), Errc::config);
  EXPECT_EQ(config_error(small_config("[1.5]", kMethods)), Errc::config);
  EXPECT_EQ(config_error(small_config("[0.1]", "[]")), Errc::config);
  EXPECT_EQ(config_error(small_config("[0.1]", R"([{"name": "a", "estimator": "empirical_mean"},
                                                   {"name": "a", "estimator": "coordinate_median"}])")),
            Errc::config);
  EXPECT_EQ(config_error(small_config("[0.1]", R"([{"name": "a,b", "estimator": "empirical_mean"}])")), Errc::config);
  EXPECT_EQ(config_error(small_config("[0.1]", R"([{"name": "a", "estimator": "empirical_mean", "typo": 1}])")),
            Errc::config);
  std::string bad_trials = small_config("[0.1]", kMethods);
  bad_trials.replace(bad_trials.find("\"trials\": 2"), 11, "\"trials\": 0");
  EXPECT_EQ(config_error(bad_trials), Errc::config);
}

TEST(Config, EstimatorSpecJsonRoundTrip) {
  RecoverySpec rec;
  rec.method = RecoveryMethod::sparse_omp;
  rec.sparsity = 2;
  rec.seed = 9;
  const auto spec = EstimatorSpec::two_step(rec, EstimatorKind::coordinate_median);
  const auto back = parse_estimator_spec(estimator_spec_json(spec));
  EXPECT_EQ(back.kind, EstimatorKind::two_step);
  EXPECT_EQ(*back.inner, EstimatorKind::coordinate_median);
  EXPECT_EQ(back.recovery->method, RecoveryMethod::sparse_omp);
  EXPECT_EQ(back.recovery->sparsity, 2);
  EXPECT_EQ(back.recovery->seed, 9u);
}

TEST(Config, LoadResolvesRelativePaths) {
  const auto dir = std::filesystem::temp_directory_path() / "robustmean_cfg_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "data.csv") << "1,2\n3,4\n5,7\n";
    std::ofstream(dir / "cfg.json") << R"({"seed": 1, "trials": 1,
      "data": {"source": "csv", "path": "data.csv", "standardize": false},
      "adversary": {"kind": "value_fraction", "strategy": "tail_hiding", "budgets": [0.0]},
      "methods": [{"name": "Mean", "estimator": "empirical_mean"}]})";
  }
  const auto cfg = load_experiment_config(dir / "cfg.json");
  EXPECT_EQ(std::get<CsvSource>(cfg.data).path, dir / "data.csv");
  const auto res = run_experiment(cfg);
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_NEAR(*res.rows.front().value, 0.0, 1e-12);
  std::filesystem::remove_all(dir);
  try {
    (void)load_experiment_config(dir / "cfg.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io);
  }
}
