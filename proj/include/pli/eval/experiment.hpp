#pragma once

// Multi-dataset, multi-method, multi-size, multi-seed experiment grid and its
// reduction into per-size rows and per-(dataset, method) sizing summaries.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "pli/dependence_estimator.hpp"
#include "pli/error.hpp"
#include "pli/eval/prequential.hpp"
#include "pli/eval/statistics.hpp"
#include "pli/probability.hpp"
#include "pli/stream/csv_dataset.hpp"
#include "pli/stream/ensemble.hpp"
#include "pli/stream/hoeffding_tree.hpp"
#include "pli/stream/naive_bayes.hpp"
#include "pli/stream/rbf_generator.hpp"

namespace pli::eval {

enum class learner_kind { hoeffding_tree, naive_bayes };
enum class vote_encoding { probability, one_hot };

struct dataset_spec {
  std::string id;
  // Synthetic generator parameters, or a path to a CSV dataset.
  std::variant<stream::rbf_config, std::string> source;
};

struct experiment_config {
  std::vector<dataset_spec> datasets;
  std::vector<stream::combiner> methods{stream::combiner::majority, stream::combiner::geometric};
  std::vector<std::size_t> sizes{2, 4, 8, 16, 32, 64, 128};
  std::size_t seeds = 10;
  std::uint64_t base_seed = 1;
  sizing_request sizing{0.9999, 4096};
  double tolerance = default_rank_tolerance;
  std::size_t instance_limit = 100'000;
  learner_kind learner = learner_kind::hoeffding_tree;
  vote_encoding encoding = vote_encoding::probability;
  stream::ensemble_options ensemble;
  stream::hoeffding_options tree;
  bool shuffle_rows = false;
  std::size_t workers = 1;
  std::size_t accuracy_window = default_accuracy_window;

  void validate() const {
    if (datasets.empty()) throw validation_error("no datasets configured");
    if (methods.empty()) throw validation_error("no methods configured");
    if (sizes.empty()) throw validation_error("size grid is empty");
    for (std::size_t n : sizes)
      if (n == 0) throw validation_error("ensemble sizes must be positive");
    if (seeds == 0) throw validation_error("seed count must be positive");
    if (instance_limit == 0) throw validation_error("instance limit must be positive");
    sizing.validate();
  }
};

// One (dataset, method, n, seed) run.
struct cell_result {
  std::string dataset;
  std::string method;
  std::size_t classes = 0;
  std::size_t n = 0;
  std::size_t seed = 0;
  std::uint64_t instances = 0;
  std::uint64_t correct = 0;
  double accuracy = 0.0;
  std::uint64_t full_rank_instances = 0;
  // Geometric-weight refits that kept the previous weights.
  std::uint64_t weight_fallbacks = 0;
  rank_counters counters;
};

// One (dataset, method, n) aggregate across seeds.
struct experiment_row {
  std::string dataset;
  std::string method;
  std::size_t classes = 0;
  std::size_t n = 0;
  std::size_t seeds = 0;
  double mean_accuracy = 0.0;
  double accuracy_stddev = 0.0;
  double pli_at_n = 0.0;
  double empirical_full_rank = 0.0;
  dependence_profile profile{2, {1.0}};
};

// One (dataset, method) sizing summary. Empty optionals render as "--".
struct summary_row {
  std::string dataset;
  std::string method;
  std::size_t classes = 0;
  dependence_profile averaged_profile{2, {1.0}};
  std::optional<std::size_t> sinc;
  std::optional<std::size_t> inc;
  std::optional<std::size_t> n_inc;
  std::optional<double> acc_pct_of_max;
  std::optional<double> correlation;
};

struct experiment_result {
  std::vector<cell_result> cells;
  std::vector<experiment_row> rows;
  std::vector<summary_row> summary;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline vote_matrix to_one_hot(const vote_matrix& votes) {
  vote_matrix out(votes.rows(), votes.cols());
  for (std::size_t i = 0; i < votes.rows(); ++i) out(i, argmax(votes.row(i))) = 1.0;
  return out;
}

// Rethrows the active exception with a context prefix, keeping its category.
[[noreturn]] inline void rethrow_with_context(std::exception_ptr ep, const std::string& context) {
  try {
    std::rethrow_exception(ep);
  } catch (const ingestion_error& e) {
    throw ingestion_error(context + ": " + e.what());
  } catch (const validation_error& e) {
    throw validation_error(context + ": " + e.what());
  } catch (const resource_error& e) {
    throw resource_error(context + ": " + e.what());
  } catch (const numerical_error& e) {
    throw numerical_error(context + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(context + ": " + e.what());
  }
}

struct prepared_dataset {
  std::string id;
  std::optional<stream::rbf_config> rbf;
  std::optional<stream::memory_stream> data;
  std::size_t classes = 0;
  std::size_t features = 0;
};

inline prepared_dataset prepare(const dataset_spec& spec) {
  prepared_dataset out;
  out.id = spec.id;
  if (const auto* rbf = std::get_if<stream::rbf_config>(&spec.source)) {
    rbf->validate();
    out.rbf = *rbf;
    out.classes = rbf->classes;
    out.features = rbf->features;
  } else {
    auto ds = stream::csv_ingest(std::get<std::string>(spec.source));
    out.classes = ds.stream.classes();
    out.features = ds.stream.feature_count();
    out.data.emplace(std::move(ds.stream));
  }
  return out;
}

template <typename Learner>
cell_result run_cell_with(const prepared_dataset& ds, stream::combiner method, std::size_t n, std::size_t seed,
                          const experiment_config& cfg, const Learner& prototype) {
  std::unique_ptr<stream::instance_stream> source;
  if (ds.rbf) {
    // The stream is a fixed dataset; seeds vary only the ensemble.
    auto rc = *ds.rbf;
    rc.instance_count = std::min(rc.instance_count, cfg.instance_limit);
    source = std::make_unique<stream::rbf_generator>(rc);
  } else {
    source = std::make_unique<stream::memory_stream>(*ds.data);
  }
  auto opts = cfg.ensemble;
  opts.mode = method;
  stream::ensemble_model<Learner> model(n, prototype, ds.classes, opts);
  std::mt19937_64 rng(mix_seed(cfg.base_seed, seed));

  estimator_options est_opts;
  est_opts.tolerance = cfg.tolerance;
  est_opts.shuffle_rows = cfg.shuffle_rows;
  est_opts.shuffle_seed = mix_seed(cfg.base_seed ^ 0x5EED, seed);
  dependence_estimator est(ds.classes, est_opts);
  auto sink = [&](const vote_matrix& votes, const stream::stream_instance&) {
    if (cfg.encoding == vote_encoding::one_hot)
      est.add(to_one_hot(votes));
    else
      est.add(votes);
  };
  const auto rec = prequential_run(*source, model, cfg.instance_limit, rng, sink, cfg.accuracy_window);

  cell_result out;
  out.dataset = ds.id;
  out.method = stream::to_string(method);
  out.classes = ds.classes;
  out.n = n;
  out.seed = seed;
  out.instances = rec.instances;
  out.correct = rec.correct;
  out.accuracy = rec.accuracy;
  out.full_rank_instances = est.report().full_rank_instances;
  out.weight_fallbacks = model.weight_fallbacks();
  out.counters = est.counters();
  return out;
}

inline cell_result run_cell(const prepared_dataset& ds, stream::combiner method, std::size_t n, std::size_t seed,
                            const experiment_config& cfg) {
  if (cfg.learner == learner_kind::naive_bayes)
    return run_cell_with(ds, method, n, seed, cfg, stream::naive_bayes(ds.classes, ds.features));
  return run_cell_with(ds, method, n, seed, cfg, stream::hoeffding_tree(ds.classes, ds.features, cfg.tree));
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline dependence_profile average_profiles(const std::vector<dependence_profile>& profiles) {
  const std::size_t m = profiles.front().classes();
  std::vector<double> acc(m - 1, 0.0);
  for (const auto& p : profiles)
    for (std::size_t l = 1; l < m; ++l) acc[l - 1] += p.at(l);
  for (double& v : acc) v = std::clamp(v / static_cast<double>(profiles.size()), 0.0, 1.0);
  return {m, std::move(acc)};
}

}  // namespace detail

// Reduces per-cell results into per-size rows and sizing summaries. Pure
// function of its inputs, so it can be re-run on cells read back from disk.
inline std::pair<std::vector<experiment_row>, std::vector<summary_row>> summarize(
    const std::vector<cell_result>& cells, const std::vector<std::size_t>& sizes, const sizing_request& sizing) {
  sizing.validate();
  // Group keys keep first-appearance order of (dataset, method).
  std::vector<std::pair<std::string, std::string>> groups;
  std::map<std::tuple<std::string, std::string, std::size_t>, std::vector<const cell_result*>> by_size;
  for (const auto& c : cells) {
    const auto key = std::make_pair(c.dataset, c.method);
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
    by_size[{c.dataset, c.method, c.n}].push_back(&c);
  }

  std::vector<experiment_row> rows;
  std::vector<summary_row> summary;
  for (const auto& [dataset, method] : groups) {
    std::vector<experiment_row> group_rows;
    for (std::size_t n : sizes) {
      const auto it = by_size.find({dataset, method, n});
      if (it == by_size.end()) continue;
      const auto& seed_cells = it->second;
      experiment_row row;
      row.dataset = dataset;
      row.method = method;
      row.classes = seed_cells.front()->classes;
      row.n = n;
      row.seeds = seed_cells.size();
      std::vector<double> accs;
      std::vector<dependence_profile> profiles;
      std::uint64_t full = 0, seen = 0;
      for (const auto* c : seed_cells) {
        if (c->classes != row.classes) throw validation_error("inconsistent class count for dataset " + dataset);
        accs.push_back(c->accuracy);
        profiles.push_back(finalize_p(c->counters));
        full += c->full_rank_instances;
        seen += c->instances;
      }
      row.mean_accuracy = detail::mean_of(accs);
      row.accuracy_stddev = detail::sample_stddev(accs);
      row.profile = detail::average_profiles(profiles);
      row.pli_at_n = pli_exact(row.profile, n);
      row.empirical_full_rank = seen == 0 ? 0.0 : static_cast<double>(full) / static_cast<double>(seen);
      group_rows.push_back(std::move(row));
    }
    if (group_rows.empty()) continue;

    summary_row s;
    s.dataset = dataset;
    s.method = method;
    s.classes = group_rows.front().classes;
    std::vector<dependence_profile> size_profiles;
    std::vector<double> plis, accs;
    std::vector<std::size_t> tested;
    std::map<std::size_t, double> acc_by_size;
    for (const auto& r : group_rows) {
      size_profiles.push_back(r.profile);
      plis.push_back(r.pli_at_n);
      accs.push_back(r.mean_accuracy);
      tested.push_back(r.n);
      acc_by_size[r.n] = r.mean_accuracy;
    }
    s.averaged_profile = detail::average_profiles(size_profiles);
    s.inc = solve_inc(s.averaged_profile, sizing);
    s.sinc = solve_sinc(s.averaged_profile.mean(), s.classes, sizing);
    if (s.inc) {
      s.n_inc = nearest_tested_size(static_cast<double>(*s.inc), tested);
      s.acc_pct_of_max = percent_of_max(acc_by_size, *s.n_inc);
    }
    if (plis.size() >= 2) {
      try {
        s.correlation = pearson_correlation(plis, accs);
      } catch (const undefined_correlation&) {
      }
    }
    rows.insert(rows.end(), group_rows.begin(), group_rows.end());
    summary.push_back(std::move(s));
  }
  return {std::move(rows), std::move(summary)};
}

// Runs every (dataset, method, n, seed) cell, in parallel when workers > 1.
// Output order is fixed by the configuration, not by completion order.
inline experiment_result run_experiment_grid(const experiment_config& cfg) {
  cfg.validate();
  std::vector<detail::prepared_dataset> datasets;
  for (const auto& d : cfg.datasets) {
    try {
      datasets.push_back(detail::prepare(d));
    } catch (...) {
      detail::rethrow_with_context(std::current_exception(), "dataset " + d.id);
    }
  }

  struct task {
    std::size_t dataset;
    stream::combiner method;
    std::size_t n;
    std::size_t seed;
  };
  std::vector<task> tasks;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (auto method : cfg.methods)
      for (std::size_t n : cfg.sizes)
        for (std::size_t s = 0; s < cfg.seeds; ++s) tasks.push_back({d, method, n, s});

  experiment_result result;
  result.cells.resize(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      try {
        result.cells[i] = detail::run_cell(datasets[t.dataset], t.method, t.n, t.seed, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, tasks.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i]) continue;
    const auto& t = tasks[i];
    detail::rethrow_with_context(errors[i], "dataset " + datasets[t.dataset].id + ", method " +
                                                stream::to_string(t.method) + ", n=" + std::to_string(t.n) +
                                                ", seed " + std::to_string(t.seed));
  }
  auto [rows, summary] = summarize(result.cells, cfg.sizes, cfg.sizing);
  result.rows = std::move(rows);
  result.summary = std::move(summary);
  return result;
}

}  // namespace pli::eval
