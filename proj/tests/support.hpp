#ifndef TOMOLAB_TESTS_SUPPORT_HPP
#define TOMOLAB_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "tomolab/graph.hpp"
#include "tomolab/weights.hpp"

namespace testing {

inline oracle::BoolMatrix to_bool_matrix(const tomolab::Graph& g) {
  oracle::BoolMatrix m(g.size(), g.size());
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j) m(i, j) = g.connected(i, j) ? 1 : 0;
  return m;
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

/// Random partial ER instance with S = {0..s-1} and an ER(q) observable block.
struct RandomInstance {
  tomolab::Graph g;
  tomolab::NodeSet s;
  tomolab::CombinationMatrix a;
};

inline RandomInstance random_instance(std::mt19937_64& rng, int n_lo, int n_hi, int s_lo, int s_hi,
                                      tomolab::WeightRule rule, double rho) {
  const int n = std::uniform_int_distribution<int>(n_lo, n_hi)(rng);
  const int s = std::min(n, std::uniform_int_distribution<int>(s_lo, s_hi)(rng));
  const double p = std::min(1.0, (std::log(double(n)) + 1.0) / n);
  const tomolab::NodeSet set = tomolab::NodeSet::range(s);
  tomolab::Graph inner = tomolab::sample_er(s, 0.4, rng);
  tomolab::Graph g = tomolab::sample_partial_er({n, p, set, inner}, rng);
  tomolab::CombinationMatrix a = tomolab::combination_matrix(g, {rule, rho, 1.0});
  return {std::move(g), set, std::move(a)};
}

}  // namespace testing

#endif  // TOMOLAB_TESTS_SUPPORT_HPP
