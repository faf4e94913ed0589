// Command-line front end: PLI curves, sizing, p estimation from vote dumps,
// single ensemble runs and the full experiment grid.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "pli/dependence_estimator.hpp"
#include "pli/enumeration.hpp"
#include "pli/error.hpp"
#include "pli/eval/experiment.hpp"
#include "pli/eval/prequential.hpp"
#include "pli/eval/report.hpp"
#include "pli/io/csv.hpp"
#include "pli/io/vote_dump.hpp"
#include "pli/probability.hpp"
#include "pli/stream/csv_dataset.hpp"
#include "pli/stream/ensemble.hpp"
#include "pli/stream/hoeffding_tree.hpp"
#include "pli/stream/naive_bayes.hpp"
#include "pli/stream/rbf_generator.hpp"

namespace {

using pli::io::format_double;

enum exit_code { ok = 0, failure = 1, invalid = 2, resource = 3, numerical = 4 };

struct range {
  std::size_t first = 0;
  std::size_t last = 0;
};

// "a..b" or a single "a".
range parse_range(const std::string& text) {
  const auto dots = text.find("..");
  auto number = [&](std::string_view s) {
    const auto v = pli::io::parse_unsigned(pli::io::trim(s));
    if (!v || *v == 0) throw pli::validation_error("bad n range '" + text + "': expected positive integers");
    return static_cast<std::size_t>(*v);
  };
  range r;
  if (dots == std::string::npos) {
    r.first = r.last = number(text);
  } else {
    r.first = number(std::string_view(text).substr(0, dots));
    r.last = number(std::string_view(text).substr(dots + 2));
  }
  if (r.first > r.last) throw pli::validation_error("bad n range '" + text + "': start exceeds end");
  return r;
}

// A single p means the same value at every dimension.
pli::dependence_profile make_profile(std::size_t m, const std::vector<double>& p) {
  if (m < 2) throw pli::validation_error("--m must be >= 2");
  if (p.size() == 1) return pli::dependence_profile::uniform(m, p.front());
  if (p.size() != m - 1)
    throw pli::validation_error("--p needs 1 or m-1 = " + std::to_string(m - 1) + " values, got " +
                                std::to_string(p.size()));
  return {m, p};
}

std::string optional_text(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "--"; }

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pli::ingestion_error("cannot open " + path);
  return in;
}

// ---- pli -------------------------------------------------------------------

struct pli_args {
  std::size_t m = 2;
  std::vector<double> p;
  std::string n = "1..16";
  std::string mode = "exact";
  std::size_t trials = 100'000;
  std::uint64_t seed = 1;
};

int run_pli(const pli_args& a) {
  const auto profile = make_profile(a.m, a.p);
  const auto r = parse_range(a.n);
  if (a.mode == "exact") {
    std::cout << "n,pli\n";
    for (const auto& pt : pli::pli_exact_curve(profile, r.first, r.last))
      std::cout << pt.n << ',' << format_double(pt.pli) << '\n';
  } else if (a.mode == "uniform") {
    if (a.p.size() != 1) throw pli::validation_error("--mode uniform takes a single --p value");
    std::cout << "n,pli\n";
    for (const auto& pt : pli::pli_uniform_curve(a.p.front(), a.m, r.first, r.last))
      std::cout << pt.n << ',' << format_double(pt.pli) << '\n';
  } else if (a.mode == "enumeration") {
    std::cout << "n,pli,terms\n";
    for (std::size_t n = r.first; n <= r.last; ++n) {
      if (n < a.m) {
        std::cout << n << ",0,0\n";
        continue;
      }
      const auto res = pli::pli_enumeration_oracle(profile, n);
      std::cout << n << ',' << format_double(res.probability) << ',' << res.term_count << '\n';
    }
  } else if (a.mode == "monte-carlo") {
    std::cout << "n,pli,std_error\n";
    for (std::size_t n = r.first; n <= r.last; ++n) {
      const auto est = pli::pli_monte_carlo(profile, n, a.trials, pli::eval::detail::mix_seed(a.seed, n));
      std::cout << n << ',' << format_double(est.estimate) << ',' << format_double(est.std_error) << '\n';
    }
  } else {
    throw pli::validation_error("unknown --mode '" + a.mode + "'");
  }
  return ok;
}

// ---- size ------------------------------------------------------------------

struct size_args {
  std::size_t m = 2;
  std::vector<double> p;
  double threshold = 0.9999;
  std::size_t max_n = 4096;
};

int run_size(const size_args& a) {
  const auto profile = make_profile(a.m, a.p);
  const pli::sizing_request req{a.threshold, a.max_n};
  const auto inc = pli::solve_inc(profile, req);
  const auto sinc = pli::solve_sinc(profile.mean(), a.m, req);
  std::cout << "INC," << optional_text(inc) << '\n' << "SINC," << optional_text(sinc) << '\n';
  return ok;
}

// ---- estimate --------------------------------------------------------------

struct estimate_args {
  std::string votes;
  double tolerance = pli::default_rank_tolerance;
  bool shuffle = false;
  std::uint64_t seed = 1;
};

int run_estimate(const estimate_args& a) {
  auto in = open_input(a.votes);
  pli::io::vote_dump_reader reader(in);
  pli::estimator_options opts;
  opts.tolerance = a.tolerance;
  opts.shuffle_rows = a.shuffle;
  opts.shuffle_seed = a.seed;
  pli::dependence_estimator est(reader.classes(), opts);
  std::optional<std::size_t> ensemble_size;
  bool mixed_sizes = false;
  while (auto inst = reader.next()) {
    if (!ensemble_size)
      ensemble_size = inst->votes.rows();
    else if (*ensemble_size != inst->votes.rows())
      mixed_sizes = true;
    est.add(inst->votes);
  }
  const auto report = est.report();
  std::cout << "l,p_l,dependent,total\n";
  for (std::size_t l = 1; l < reader.classes(); ++l)
    std::cout << l << ',' << format_double(report.profile.at(l)) << ',' << report.counters.dependent[l - 1] << ','
              << report.counters.total[l - 1] << '\n';
  std::cout << "instances," << report.instances_seen << '\n';
  std::cout << "empirical_pli," << format_double(report.full_rank_fraction()) << '\n';
  if (ensemble_size && !mixed_sizes)
    std::cout << "model_pli," << format_double(pli::pli_exact(report.profile, *ensemble_size)) << '\n';
  return ok;
}

// ---- shared dataset / learner flags ------------------------------------------

struct stream_args {
  std::vector<std::size_t> rbf_classes;
  std::vector<std::string> csv_paths;
  std::size_t features = 20;
  std::size_t centroids = 50;
  std::uint64_t rbf_seed = 1;
  double centroid_box = pli::stream::rbf_config{}.centroid_box;
  std::size_t instances = 100'000;
  std::string learner = "ht";
  std::string encoding = "probability";
  double tolerance = pli::default_rank_tolerance;
  bool shuffle = false;
  std::size_t window = 100;
  double ridge = 1e-8;
};

void add_stream_flags(CLI::App* cmd, stream_args& a) {
  cmd->add_option("--rbf", a.rbf_classes, "RBF stream(s) with this many classes")->delimiter(',');
  cmd->add_option("--csv", a.csv_paths, "CSV dataset(s): header, numeric features, trailing label")->delimiter(',');
  cmd->add_option("--features", a.features, "RBF feature count")->capture_default_str();
  cmd->add_option("--centroids", a.centroids, "RBF centroid count")->capture_default_str();
  cmd->add_option("--rbf-seed", a.rbf_seed, "RBF generator seed")->capture_default_str();
  cmd->add_option("--centroid-box", a.centroid_box, "RBF centroid coordinate range")->capture_default_str();
  cmd->add_option("--instances", a.instances, "instance cap per run")->capture_default_str();
  cmd->add_option("--learner", a.learner, "base learner: ht or nb")
      ->check(CLI::IsMember({"ht", "nb"}))
      ->capture_default_str();
  cmd->add_option("--encoding", a.encoding, "votes fed to the estimator: probability or one-hot")
      ->check(CLI::IsMember({"probability", "one-hot"}))
      ->capture_default_str();
  cmd->add_option("--tol", a.tolerance, "relative rank tolerance")->capture_default_str();
  cmd->add_flag("--shuffle", a.shuffle, "replay member votes in random order per instance");
  cmd->add_option("--window", a.window, "geometric-weight window capacity")->capture_default_str();
  cmd->add_option("--ridge", a.ridge, "ridge term for geometric weights")->capture_default_str();
}

std::vector<pli::eval::dataset_spec> datasets_from(const stream_args& a) {
  std::vector<pli::eval::dataset_spec> out;
  for (std::size_t m : a.rbf_classes) {
    pli::stream::rbf_config rc;
    rc.classes = m;
    rc.features = a.features;
    rc.centroids = a.centroids;
    rc.seed = a.rbf_seed;
    rc.centroid_box = a.centroid_box;
    rc.instance_count = a.instances;
    rc.validate();
    out.push_back({"rbf" + std::to_string(m), rc});
  }
  for (const auto& path : a.csv_paths) out.push_back({std::filesystem::path(path).stem().string(), path});
  if (out.empty()) throw pli::validation_error("no dataset given: use --rbf and/or --csv");
  return out;
}

pli::stream::combiner parse_method(const std::string& s) {
  if (s == "ozabag") return pli::stream::combiner::majority;
  if (s == "goowe") return pli::stream::combiner::geometric;
  throw pli::validation_error("unknown method '" + s + "' (expected ozabag or goowe)");
}

void apply_common(pli::eval::experiment_config& cfg, const stream_args& a) {
  cfg.datasets = datasets_from(a);
  cfg.instance_limit = a.instances;
  cfg.learner = a.learner == "nb" ? pli::eval::learner_kind::naive_bayes : pli::eval::learner_kind::hoeffding_tree;
  cfg.encoding = a.encoding == "one-hot" ? pli::eval::vote_encoding::one_hot : pli::eval::vote_encoding::probability;
  cfg.tolerance = a.tolerance;
  cfg.shuffle_rows = a.shuffle;
  cfg.ensemble.window_capacity = a.window;
  cfg.ensemble.ridge = a.ridge;
}

// ---- simulate --------------------------------------------------------------

struct simulate_args {
  stream_args stream;
  std::string method = "ozabag";
  std::size_t n = 10;
  std::uint64_t seed = 1;
  std::string votes_out;
};

template <typename Learner>
int simulate_with(const simulate_args& a, const pli::eval::experiment_config& cfg, const Learner& prototype,
                  pli::stream::instance_stream& source) {
  const std::size_t m = source.classes();
  auto opts = cfg.ensemble;
  opts.mode = parse_method(a.method);
  pli::stream::ensemble_model<Learner> model(a.n, prototype, m, opts);
  std::mt19937_64 rng(pli::eval::detail::mix_seed(cfg.base_seed, a.seed));

  std::ofstream dump;
  if (!a.votes_out.empty()) {
    dump.open(a.votes_out, std::ios::binary | std::ios::trunc);
    if (!dump) throw pli::resource_error("cannot write " + a.votes_out);
    pli::io::write_vote_dump_header(dump, m);
  }
  pli::estimator_options eo;
  eo.tolerance = cfg.tolerance;
  eo.shuffle_rows = cfg.shuffle_rows;
  eo.shuffle_seed = a.seed;
  pli::dependence_estimator est(m, eo);
  std::uint64_t id = 0;
  auto sink = [&](const pli::vote_matrix& votes, const pli::stream::stream_instance&) {
    const auto fed = cfg.encoding == pli::eval::vote_encoding::one_hot ? pli::eval::detail::to_one_hot(votes) : votes;
    est.add(fed);
    if (dump.is_open()) pli::io::write_vote_dump_rows(dump, id, fed);
    ++id;
  };
  const auto rec = pli::eval::prequential_run(source, model, cfg.instance_limit, rng, sink);
  if (dump.is_open()) {
    dump.flush();
    if (!dump) throw pli::resource_error("write failed for " + a.votes_out);
  }
  const auto report = est.report();
  std::cout << "instances," << rec.instances << '\n';
  std::cout << "accuracy," << format_double(rec.accuracy) << '\n';
  for (std::size_t l = 1; l < m; ++l) std::cout << "p_" << l << ',' << format_double(report.profile.at(l)) << '\n';
  std::cout << "empirical_pli," << format_double(report.full_rank_fraction()) << '\n';
  std::cout << "model_pli," << format_double(pli::pli_exact(report.profile, a.n)) << '\n';
  if (opts.mode == pli::stream::combiner::geometric) std::cout << "weight_fallbacks," << model.weight_fallbacks() << '\n';
  return ok;
}

int run_simulate(const simulate_args& a) {
  if (a.stream.rbf_classes.size() + a.stream.csv_paths.size() != 1)
    throw pli::validation_error("simulate takes exactly one dataset (--rbf M or --csv PATH)");
  pli::eval::experiment_config cfg;
  apply_common(cfg, a.stream);
  const auto ds = pli::eval::detail::prepare(cfg.datasets.front());
  std::unique_ptr<pli::stream::instance_stream> source;
  if (ds.rbf)
    source = std::make_unique<pli::stream::rbf_generator>(*ds.rbf);
  else
    source = std::make_unique<pli::stream::memory_stream>(*ds.data);
  if (cfg.learner == pli::eval::learner_kind::naive_bayes)
    return simulate_with(a, cfg, pli::stream::naive_bayes(ds.classes, ds.features), *source);
  return simulate_with(a, cfg, pli::stream::hoeffding_tree(ds.classes, ds.features, cfg.tree), *source);
}

// ---- experiment ------------------------------------------------------------

struct experiment_args {
  stream_args stream;
  std::vector<std::string> methods{"ozabag", "goowe"};
  std::vector<std::size_t> sizes{2, 4, 8, 16, 32, 64, 128};
  std::size_t seeds = 10;
  std::uint64_t base_seed = 1;
  double threshold = 0.9999;
  std::size_t max_n = 4096;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out = "results";
  bool reproducible = false;
};

int run_experiment(const experiment_args& a) {
  pli::eval::experiment_config cfg;
  apply_common(cfg, a.stream);
  cfg.methods.clear();
  for (const auto& m : a.methods) cfg.methods.push_back(parse_method(m));
  cfg.sizes = a.sizes;
  cfg.seeds = a.seeds;
  cfg.base_seed = a.base_seed;
  cfg.sizing = {a.threshold, a.max_n};
  cfg.workers = a.workers;
  cfg.validate();

  const auto result = pli::eval::run_experiment_grid(cfg);
  const std::size_t curve_max = *std::max_element(cfg.sizes.begin(), cfg.sizes.end());
  pli::eval::write_report(a.out, result, curve_max, {a.reproducible});
  pli::eval::write_summary_csv(std::cout, result.summary, {true});
  return ok;
}

// Splices "key = value" lines from the experiment's --config file into the
// argument list. Keys already present on the command line are skipped, so
// flags win over the file.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  const auto sub = std::find(args.begin(), args.end(), "experiment");
  if (sub == args.end()) return args;
  std::string path;
  auto it = sub + 1;
  for (; it != args.end(); ++it) {
    if (*it == "--config" && it + 1 != args.end()) {
      path = *(it + 1);
      it = args.erase(it, it + 2);
      break;
    }
    if (it->rfind("--config=", 0) == 0) {
      path = it->substr(9);
      it = args.erase(it);
      break;
    }
  }
  if (path.empty()) return args;
  auto given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  auto in = open_input(path);
  std::vector<std::string> extra;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = pli::io::trim(line);
    if (text.empty() || text.front() == '#' || text.front() == ';' || text.front() == '[') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw pli::ingestion_error("expected key = value in " + path, line_no);
    std::string key(pli::io::trim(text.substr(0, eq)));
    std::string value(pli::io::trim(text.substr(eq + 1)));
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (value.size() >= 2 && ((value.front() == '[' && value.back() == ']') ||
                              (value.front() == '"' && value.back() == '"')))
      value = value.substr(1, value.size() - 2);
    value.erase(std::remove(value.begin(), value.end(), ' '), value.end());
    if (given(key)) continue;
    if (key == "--reproducible" || key == "--shuffle") {
      if (value == "true" || value == "1") extra.push_back(key);
      continue;
    }
    extra.push_back(key);
    extra.push_back(value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probability of linear independence for ensemble votes: curves, sizing and experiments", "pli"};
  app.require_subcommand(1);

  pli_args pa;
  auto* pli_cmd = app.add_subcommand("pli", "print P(full rank) for a range of ensemble sizes");
  pli_cmd->add_option("--m", pa.m, "number of classes")->required();
  pli_cmd->add_option("--p", pa.p, "dependence probabilities p_1..p_{m-1}, or one value for all")
      ->required()
      ->delimiter(',');
  pli_cmd->add_option("--n", pa.n, "ensemble sizes, a..b or a single value")->capture_default_str();
  pli_cmd->add_option("--mode", pa.mode, "exact, uniform, enumeration or monte-carlo")
      ->check(CLI::IsMember({"exact", "uniform", "enumeration", "monte-carlo"}))
      ->capture_default_str();
  pli_cmd->add_option("--trials", pa.trials, "Monte Carlo trials per size")->capture_default_str();
  pli_cmd->add_option("--seed", pa.seed, "Monte Carlo seed")->capture_default_str();

  size_args sa;
  auto* size_cmd = app.add_subcommand("size", "smallest ensemble reaching a PLI threshold");
  size_cmd->add_option("--m", sa.m, "number of classes")->required();
  size_cmd->add_option("--p", sa.p, "dependence probabilities p_1..p_{m-1}, or one value for all")
      ->required()
      ->delimiter(',');
  size_cmd->add_option("--t,--threshold", sa.threshold, "PLI threshold in (0, 1)")->capture_default_str();
  size_cmd->add_option("--max-n", sa.max_n, "largest size searched")->capture_default_str();

  estimate_args ea;
  auto* est_cmd = app.add_subcommand("estimate", "estimate dependence probabilities from a vote dump");
  est_cmd->add_option("votes", ea.votes, "vote dump CSV")->required();
  est_cmd->add_option("--tol", ea.tolerance, "relative rank tolerance")->capture_default_str();
  est_cmd->add_flag("--shuffle", ea.shuffle, "replay votes in random order per instance");
  est_cmd->add_option("--seed", ea.seed, "shuffle seed")->capture_default_str();

  simulate_args sim;
  auto* sim_cmd = app.add_subcommand("simulate", "one prequential ensemble run with p estimation");
  add_stream_flags(sim_cmd, sim.stream);
  sim_cmd->add_option("--method", sim.method, "ozabag or goowe")
      ->check(CLI::IsMember({"ozabag", "goowe"}))
      ->capture_default_str();
  sim_cmd->add_option("--n", sim.n, "ensemble size")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "ensemble seed")->capture_default_str();
  sim_cmd->add_option("--votes-out", sim.votes_out, "write the vote dump here");

  experiment_args xa;
  auto* exp_cmd = app.add_subcommand("experiment", "full size x seed grid, writes CSV tables");
  std::string config_path;
  exp_cmd->add_option("--config", config_path, "file of flag = value lines; command-line flags win");
  add_stream_flags(exp_cmd, xa.stream);
  exp_cmd->add_option("--methods", xa.methods, "ozabag,goowe")->delimiter(',')->capture_default_str();
  exp_cmd->add_option("--sizes", xa.sizes, "ensemble sizes")->delimiter(',')->capture_default_str();
  exp_cmd->add_option("--seeds", xa.seeds, "seeds per cell")->capture_default_str();
  exp_cmd->add_option("--base-seed", xa.base_seed, "seed mixed into every run")->capture_default_str();
  exp_cmd->add_option("--threshold,--t", xa.threshold, "PLI threshold in (0, 1)")->capture_default_str();
  exp_cmd->add_option("--max-n", xa.max_n, "largest size searched for INC/SINC")->capture_default_str();
  exp_cmd->add_option("--workers", xa.workers, "parallel runs")->capture_default_str();
  exp_cmd->add_option("--out", xa.out, "output directory")->capture_default_str();
  exp_cmd->add_flag("--reproducible", xa.reproducible, "omit the timestamp line from output files");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : invalid;
  } catch (const pli::validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  }

  try {
    if (*pli_cmd) return run_pli(pa);
    if (*size_cmd) return run_size(sa);
    if (*est_cmd) return run_estimate(ea);
    if (*sim_cmd) return run_simulate(sim);
    if (*exp_cmd) return run_experiment(xa);
  } catch (const pli::validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  } catch (const pli::resource_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return resource;
  } catch (const pli::numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
  return failure;
}
