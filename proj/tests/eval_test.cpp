#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "pli/error.hpp"
#include "pli/eval/experiment.hpp"
#include "pli/eval/prequential.hpp"
#include "pli/eval/statistics.hpp"
#include "pli/probability.hpp"
#include "pli/stream/instance.hpp"

using namespace pli;
using namespace pli::eval;

namespace {

stream::memory_stream labelled_stream(const std::vector<std::size_t>& labels, std::size_t classes) {
  std::vector<stream::stream_instance> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) rows.push_back({{static_cast<double>(labels[i])}, labels[i]});
  return {std::move(rows), classes, 1};
}

vote_matrix one_hot_row(std::size_t c, std::size_t classes) {
  vote_matrix v;
  v.append_row(vote_vector::one_hot(classes, c).scores());
  return v;
}

// Predicts the class stored in the first feature.
struct oracle_model {
  std::size_t classes;
  stream::ensemble_prediction predict(std::span<const double> x) const {
    const auto c = static_cast<std::size_t>(x[0]);
    return {one_hot_row(c, classes), c};
  }
  template <typename Rng>
  void learn(const stream::stream_instance&, const stream::ensemble_prediction&, Rng&) {}
};

struct constant_model {
  std::size_t classes;
  std::size_t answer;
  std::size_t trained = 0;
  stream::ensemble_prediction predict(std::span<const double>) const {
    return {one_hot_row(answer, classes), answer};
  }
  template <typename Rng>
  void learn(const stream::stream_instance&, const stream::ensemble_prediction&, Rng&) {
    ++trained;
  }
};

cell_result synthetic_cell(const std::string& method, std::size_t m, std::size_t n, std::size_t seed, double accuracy,
                           std::vector<std::uint64_t> dependent, std::vector<std::uint64_t> total) {
  cell_result c;
  c.dataset = "synthetic";
  c.method = method;
  c.classes = m;
  c.n = n;
  c.seed = seed;
  c.instances = 1000;
  c.correct = static_cast<std::uint64_t>(accuracy * 1000);
  c.accuracy = accuracy;
  c.counters = rank_counters(m);
  c.counters.dependent = std::move(dependent);
  c.counters.total = std::move(total);
  return c;
}

}  // namespace

TEST(Prequential, OracleIsAlwaysRight) {
  auto s = labelled_stream({0, 1, 2, 1, 0, 2, 2}, 3);
  oracle_model model{3};
  std::mt19937_64 rng(1);
  const auto rec = prequential_run(s, model, 100, rng);
  EXPECT_EQ(rec.instances, 7u);
  EXPECT_DOUBLE_EQ(rec.accuracy, 1.0);
}

TEST(Prequential, ConstantPredictorScoresClassShare) {
  std::mt19937_64 gen(3);
  std::bernoulli_distribution is_one(0.3);
  std::vector<std::size_t> labels(20'000);
  for (auto& l : labels) l = is_one(gen) ? 1 : 0;
  auto s = labelled_stream(labels, 2);
  constant_model model{2, 0};
  std::mt19937_64 rng(1);
  const auto rec = prequential_run(s, model, labels.size(), rng);
  const double sd = std::sqrt(0.7 * 0.3 / static_cast<double>(labels.size()));
  EXPECT_NEAR(rec.accuracy, 0.7, 4.0 * sd);
  EXPECT_EQ(model.trained, labels.size());
}

TEST(Prequential, PredictsBeforeTraining) {
  // The sink sees every vote matrix before learn() is called for that instance.
  auto s = labelled_stream({1, 1, 0}, 2);
  constant_model model{2, 1};
  std::mt19937_64 rng(1);
  std::vector<std::size_t> trained_at_sink;
  prequential_run(s, model, 10, rng,
                  [&](const vote_matrix&, const stream::stream_instance&) { trained_at_sink.push_back(model.trained); });
  EXPECT_EQ(trained_at_sink, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Prequential, LimitTruncatesAndShortStreamIsCounted) {
  auto s = labelled_stream({0, 1, 0, 1, 0}, 2);
  oracle_model model{2};
  std::mt19937_64 rng(1);
  EXPECT_EQ(prequential_run(s, model, 3, rng).instances, 3u);
  s.rewind();
  EXPECT_EQ(prequential_run(s, model, 50, rng).instances, 5u);
}

TEST(Prequential, ZeroLimitAndEmptyStreamAreRejected) {
  auto s = labelled_stream({0, 1}, 2);
  oracle_model model{2};
  std::mt19937_64 rng(1);
  EXPECT_THROW(prequential_run(s, model, 0, rng), validation_error);
  prequential_run(s, model, 10, rng);
  EXPECT_THROW(prequential_run(s, model, 10, rng), validation_error);
}

TEST(Prequential, WindowedAccuracies) {
  auto s = labelled_stream({0, 0, 1, 1, 0}, 2);
  constant_model model{2, 0};
  std::mt19937_64 rng(1);
  const auto rec = prequential_run(s, model, 10, rng, [](const vote_matrix&, const stream::stream_instance&) {}, 2);
  ASSERT_EQ(rec.windowed_accuracies.size(), 3u);
  EXPECT_EQ(rec.windowed_accuracies[0], (std::pair<std::uint64_t, double>{2, 1.0}));
  EXPECT_EQ(rec.windowed_accuracies[1], (std::pair<std::uint64_t, double>{4, 0.0}));
  EXPECT_EQ(rec.windowed_accuracies[2], (std::pair<std::uint64_t, double>{5, 1.0}));
  EXPECT_DOUBLE_EQ(rec.accuracy, 0.6);
}

TEST(Pearson, SpecExamples) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_NEAR(pearson_correlation(x, std::vector<double>{2, 4, 6}), 1.0, 1e-15);
  EXPECT_NEAR(pearson_correlation(x, std::vector<double>{6, 4, 2}), -1.0, 1e-15);
  EXPECT_NEAR(pearson_correlation(x, std::vector<double>{1, 2, 2}), std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(Pearson, ConstantInputIsUndefined) {
  EXPECT_THROW(pearson_correlation(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}), undefined_correlation);
  EXPECT_THROW(pearson_correlation(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), validation_error);
  EXPECT_THROW(pearson_correlation(std::vector<double>{1}, std::vector<double>{1}), validation_error);
}

TEST(NearestTestedSize, Examples) {
  const std::vector<std::size_t> grid{2, 4, 8, 16, 32, 64, 128};
  EXPECT_EQ(nearest_tested_size(33, grid), 32u);
  EXPECT_EQ(nearest_tested_size(61, grid), 64u);
  EXPECT_EQ(nearest_tested_size(48, grid), 32u);
  EXPECT_EQ(nearest_tested_size(1000, grid), 128u);
  EXPECT_EQ(nearest_tested_size(1, grid), 2u);
  EXPECT_THROW(nearest_tested_size(5, std::vector<std::size_t>{}), validation_error);
}

TEST(NearestTestedSize, PublishedRowsWithoutTies) {
  // (INC, n_INC) pairs from the published sizing table whose INC is not
  // equidistant from two grid sizes.
  const std::vector<std::size_t> grid{2, 4, 8, 16, 32, 64, 128};
  const std::pair<std::size_t, std::size_t> rows[] = {{33, 32}, {42, 32}, {39, 32}, {61, 64}, {22, 16}, {26, 32},
                                                      {8, 8},   {5, 4},   {7, 8},   {14, 16}, {13, 16}, {34, 32},
                                                      {32, 32}, {66, 64}, {65, 64}, {4, 4}};
  for (const auto& [inc, n_inc] : rows) EXPECT_EQ(nearest_tested_size(static_cast<double>(inc), grid), n_inc) << inc;
}

TEST(PercentOfMax, Examples) {
  EXPECT_DOUBLE_EQ(percent_of_max({{4, 0.8}, {8, 0.9}}, 8), 100.0);
  EXPECT_NEAR(percent_of_max({{4, 0.8}, {8, 0.9}}, 4), 100.0 * 0.8 / 0.9, 1e-12);
  EXPECT_DOUBLE_EQ(percent_of_max({{16, 0.42}}, 16), 100.0);
  EXPECT_THROW(percent_of_max({{4, 0.8}}, 8), validation_error);
}

TEST(Summarize, AllIndependentGivesMinimalSizes) {
  // p = 0 everywhere: INC = SINC = m.
  std::vector<cell_result> cells;
  const std::vector<std::size_t> sizes{4, 8};
  for (std::size_t n : sizes)
    for (std::size_t s = 0; s < 2; ++s)
      cells.push_back(synthetic_cell("ozabag", 4, n, s, n == 4 ? 0.7 : 0.75, {0, 0, 0}, {100, 100, 100}));
  const auto [rows, summary] = summarize(cells, sizes, {});
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_EQ(summary[0].inc, std::optional<std::size_t>(4));
  EXPECT_EQ(summary[0].sinc, std::optional<std::size_t>(4));
  EXPECT_EQ(summary[0].n_inc, std::optional<std::size_t>(4));
  EXPECT_NEAR(*summary[0].acc_pct_of_max, 100.0 * 0.7 / 0.75, 1e-12);
  // PLI is 1 at both sizes, so the correlation is undefined.
  EXPECT_FALSE(summary[0].correlation.has_value());
}

TEST(Summarize, CertainDependenceIsUnreachable) {
  std::vector<cell_result> cells;
  const std::vector<std::size_t> sizes{2, 4, 8};
  for (std::size_t n : sizes) cells.push_back(synthetic_cell("goowe", 3, n, 0, 0.5, {50, 0}, {50, 0}));
  const auto [rows, summary] = summarize(cells, sizes, {});
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_DOUBLE_EQ(summary[0].averaged_profile.at(1), 1.0);
  EXPECT_FALSE(summary[0].inc.has_value());
  EXPECT_FALSE(summary[0].sinc.has_value());
  EXPECT_FALSE(summary[0].n_inc.has_value());
  EXPECT_FALSE(summary[0].acc_pct_of_max.has_value());
  for (const auto& r : rows) EXPECT_EQ(r.pli_at_n, 0.0);
}

TEST(Summarize, TwoSizeCorrelationIsOne) {
  // m = 2 with p_1 = 0.5: PLI(2) = 0.5, PLI(20) ~ 1.
  std::vector<cell_result> cells{synthetic_cell("ozabag", 2, 2, 0, 0.8, {50}, {100}),
                                 synthetic_cell("ozabag", 2, 20, 0, 0.9, {50}, {100})};
  const auto [rows, summary] = summarize(cells, {2, 20}, {});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].pli_at_n, 0.5);
  ASSERT_TRUE(summary[0].correlation.has_value());
  EXPECT_NEAR(*summary[0].correlation, 1.0, 1e-12);
}

TEST(Summarize, MeanAndStddevAcrossSeeds) {
  std::vector<cell_result> cells{synthetic_cell("ozabag", 2, 4, 0, 0.6, {1}, {10}),
                                 synthetic_cell("ozabag", 2, 4, 1, 0.7, {3}, {10}),
                                 synthetic_cell("ozabag", 2, 4, 2, 0.8, {2}, {10})};
  const auto [rows, summary] = summarize(cells, {4}, {});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].mean_accuracy, 0.7, 1e-15);
  EXPECT_NEAR(rows[0].accuracy_stddev, 0.1, 1e-15);
  EXPECT_EQ(rows[0].seeds, 3u);
  // Per-seed profiles 0.1, 0.3, 0.2 averaged.
  EXPECT_NEAR(rows[0].profile.at(1), 0.2, 1e-15);
  EXPECT_NEAR(rows[0].pli_at_n, pli_exact(dependence_profile(2, {0.2}), 4), 1e-15);
}

TEST(Summarize, NeverReachedDimensionsCountAsCertain) {
  // At n = 2 with m = 3 the second dimension is never reached -> 1.0 there;
  // the size average then mixes it with the n = 8 estimate.
  std::vector<cell_result> cells{synthetic_cell("ozabag", 3, 2, 0, 0.5, {0, 0}, {10, 0}),
                                 synthetic_cell("ozabag", 3, 8, 0, 0.6, {0, 2}, {10, 10})};
  const auto [rows, summary] = summarize(cells, {2, 8}, {});
  EXPECT_DOUBLE_EQ(rows[0].profile.at(2), 1.0);
  EXPECT_NEAR(summary[0].averaged_profile.at(2), 0.6, 1e-15);
  EXPECT_NEAR(summary[0].averaged_profile.at(1), 0.0, 1e-15);
}

TEST(Summarize, GroupsKeepInputOrder) {
  std::vector<cell_result> cells{synthetic_cell("goowe", 2, 4, 0, 0.6, {1}, {10}),
                                 synthetic_cell("ozabag", 2, 4, 0, 0.7, {1}, {10})};
  const auto [rows, summary] = summarize(cells, {4}, {});
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[0].method, "goowe");
  EXPECT_EQ(summary[1].method, "ozabag");
}

TEST(ExperimentGrid, SmallRbfRunIsDeterministicAcrossWorkerCounts) {
  experiment_config cfg;
  stream::rbf_config rc;
  rc.classes = 3;
  cfg.datasets = {{"rbf3", rc}};
  cfg.sizes = {2, 4};
  cfg.seeds = 2;
  cfg.instance_limit = 1500;
  cfg.learner = learner_kind::naive_bayes;
  cfg.workers = 1;
  const auto a = run_experiment_grid(cfg);
  cfg.workers = 3;
  const auto b = run_experiment_grid(cfg);
  ASSERT_EQ(a.cells.size(), 8u);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].accuracy, b.cells[i].accuracy);
    EXPECT_EQ(a.cells[i].counters, b.cells[i].counters);
  }
  ASSERT_EQ(a.summary.size(), 2u);
  EXPECT_EQ(a.summary[0].method, "ozabag");
  EXPECT_EQ(a.summary[1].method, "goowe");
  for (const auto& r : a.rows) EXPECT_EQ(r.seeds, 2u);
}

TEST(ExperimentGrid, RejectsBadConfig) {
  experiment_config cfg;
  EXPECT_THROW(run_experiment_grid(cfg), validation_error);
  cfg.datasets = {{"rbf3", stream::rbf_config{}}};
  cfg.sizing.threshold = 1.0;
  EXPECT_THROW(run_experiment_grid(cfg), validation_error);
  cfg.sizing.threshold = 0.9;
  cfg.sizes = {0};
  EXPECT_THROW(run_experiment_grid(cfg), validation_error);
}

TEST(ExperimentGrid, MissingCsvIsAnIngestionErrorWithContext) {
  experiment_config cfg;
  cfg.datasets = {{"missing", std::string("/nonexistent/data.csv")}};
  try {
    run_experiment_grid(cfg);
    FAIL() << "expected an ingestion error";
  } catch (const ingestion_error& e) {
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
}
