// Online bagging on a synthetic stream: measure how often member votes are
// linearly dependent, then size the ensemble from what was measured.

#include <cstdio>
#include <random>

#include "pli/dependence_estimator.hpp"
#include "pli/probability.hpp"
#include "pli/stream/ensemble.hpp"
#include "pli/stream/hoeffding_tree.hpp"
#include "pli/stream/rbf_generator.hpp"

int main() {
  pli::stream::rbf_config rbf;
  rbf.classes = 3;
  rbf.instance_count = 20'000;
  pli::stream::rbf_generator source(rbf);

  const std::size_t members = 6;
  pli::stream::ensemble_model<pli::stream::hoeffding_tree> model(
      members, pli::stream::hoeffding_tree(rbf.classes, rbf.features), rbf.classes);
  pli::dependence_estimator estimator(rbf.classes);
  std::mt19937_64 rng(7);

  std::size_t correct = 0, seen = 0;
  while (auto inst = source.next()) {
    const auto pred = model.predict(inst->features);
    estimator.add(pred.votes);
    correct += pred.predicted_class == inst->label;
    ++seen;
    model.learn(*inst, pred, rng);
  }

  const auto report = estimator.report();
  std::printf("accuracy %.4f over %zu instances\n", static_cast<double>(correct) / static_cast<double>(seen), seen);
  for (std::size_t l = 1; l < rbf.classes; ++l) std::printf("p_%zu = %.4f\n", l, report.profile.at(l));
  std::printf("full rank: measured %.4f, model %.4f\n", report.full_rank_fraction(),
              pli::pli_exact(report.profile, members));
  if (const auto inc = pli::solve_inc(report.profile, {0.9999, 4096}))
    std::printf("members needed for 0.9999: %zu\n", *inc);
  else
    std::printf("members needed for 0.9999: --\n");
}
