// Ensemble sizing from a dependence profile, plus exact weights for one
// instance whose votes span every class.

#include <cstdio>

#include "pli/probability.hpp"
#include "pli/vote_algebra.hpp"

int main() {
  const pli::dependence_profile profile(4, {0.2, 0.45, 0.7});

  std::printf("n    P(full rank)\n");
  for (const auto& pt : pli::pli_exact_curve(profile, 4, 16)) std::printf("%-4zu %.6f\n", pt.n, pt.pli);

  const pli::sizing_request req{0.9999, 4096};
  const auto inc = pli::solve_inc(profile, req);
  const auto sinc = pli::solve_sinc(profile.mean(), profile.classes(), req);
  std::printf("full profile needs %zu members, uniform approximation %zu\n", inc.value_or(0), sinc.value_or(0));

  const auto votes = pli::vote_matrix::from_rows({{0.7, 0.1, 0.1, 0.1},
                                                  {0.1, 0.6, 0.2, 0.1},
                                                  {0.25, 0.25, 0.25, 0.25},
                                                  {0.1, 0.1, 0.3, 0.5},
                                                  {0.2, 0.2, 0.5, 0.1}});
  const auto weights = pli::exact_ideal_weights(votes, {2, 4});
  std::printf("weights reaching the one-hot vote for class 2:");
  for (double w : weights) std::printf(" %.4f", w);
  std::printf("\n");
}
