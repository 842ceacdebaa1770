#ifndef TOMOLAB_DYNAMICS_HPP
#define TOMOLAB_DYNAMICS_HPP

#include <cstdint>
#include <iosfwd>

#include <Eigen/Dense>

#include "tomolab/graph.hpp"
#include "tomolab/weights.hpp"

namespace tomolab {

/// Zero-mean, unit-variance input distributions.
enum class Noise { Gaussian, Rademacher, UniformCentered };

struct SimConfig {
  double beta = 0.2;
  long n_max = 100000;
  long burn_in = 1000;
  Noise noise = Noise::Gaussian;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Zero-lag and one-lag correlations restricted to `node_index`.
/// sample_count == 0 marks exact (analytic) correlations.
struct CorrelationSet {
  Eigen::MatrixXd r0;
  Eigen::MatrixXd r1;
  long sample_count = 0;
  NodeSet node_index;

  bool analytic() const { return sample_count == 0; }
};

/// Sub-blocks of `corr` on `subset`, which must be contained in corr.node_index.
CorrelationSet restrict_to(const CorrelationSet& corr, const NodeSet& subset);

/// Steady-state R0 = beta^2 (I - A^2)^{-1} and R1 = A R0, truncated to `s`.
/// Throws NumericError if I - A^2 is not numerically positive definite.
CorrelationSet analytic_correlations(const CombinationMatrix& a, double beta, const NodeSet& s);

/// Runs y_n = A y_{n-1} + beta x_n from y = 0, drops cfg.burn_in steps, then
/// streams the sample averages
///   R0 = sum_{n=0}^{n_max} y_n y_n^T / (n_max + 1)
///   R1 = sum_{n=0}^{n_max-1} y_{n+1} y_n^T / n_max
/// over the nodes of `s`. When `raw_dump` is set, every retained observable
/// sample is written as "n,node_id,y".
CorrelationSet simulate_and_accumulate(const CombinationMatrix& a, const SimConfig& cfg,
                                       const NodeSet& s, std::ostream* raw_dump = nullptr);

}  // namespace tomolab

#endif  // TOMOLAB_DYNAMICS_HPP
