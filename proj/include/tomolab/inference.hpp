#ifndef TOMOLAB_INFERENCE_HPP
#define TOMOLAB_INFERENCE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tomolab/dynamics.hpp"
#include "tomolab/errors.hpp"
#include "tomolab/graph.hpp"
#include "tomolab/weights.hpp"

namespace tomolab {

/// Condition numbers above this are flagged in SolveReport.
inline constexpr double kConditionWarning = 1e8;

struct SolveReport {
  /// Estimate of the 1-norm condition number of the factored matrix.
  double condition = 1.0;
  bool ill_conditioned = false;
};

/// R1 * R0^{-1} through a Cholesky factorization of the symmetric R0.
/// Works for any floating scalar; throws NumericError when R0 is not
/// numerically positive definite.
template <typename DerivedR1, typename DerivedR0>
Eigen::Matrix<typename DerivedR0::Scalar, Eigen::Dynamic, Eigen::Dynamic> granger_estimate(
    const Eigen::MatrixBase<DerivedR1>& r1, const Eigen::MatrixBase<DerivedR0>& r0,
    SolveReport* report = nullptr) {
  using Scalar = typename DerivedR0::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (r0.rows() != r0.cols() || r1.rows() != r0.rows() || r1.cols() != r0.cols()) {
    throw std::invalid_argument("granger_estimate: correlation matrices must be square and equal-sized");
  }
  Eigen::LLT<Matrix> llt(r0.derived());
  const Scalar rcond = llt.info() == Eigen::Success ? llt.rcond() : Scalar(0);
  if (llt.info() != Eigen::Success || !(rcond > Eigen::NumTraits<Scalar>::epsilon())) {
    const std::string cond = rcond > Scalar(0) ? std::to_string(double(1 / rcond)) : std::string("inf");
    throw NumericError("zero-lag correlation matrix is singular or indefinite (condition number ~ " +
                       cond + ")");
  }
  if (report) {
    report->condition = double(1 / rcond);
    report->ill_conditioned = report->condition > kConditionWarning;
  }
  // R1 R0^{-1} = (R0^{-1} R1^T)^T because R0 is symmetric.
  return llt.solve(r1.transpose()).transpose();
}

/// Â = R1 R0^{-1} over the whole network; corr.node_index must be {0..n-1}.
Eigen::MatrixXd granger_full(const CorrelationSet& corr, SolveReport* report = nullptr);

/// Â_S = [R1]_S ([R0]_S)^{-1} for the observed nodes of corr.
Eigen::MatrixXd granger_truncated(const CorrelationSet& corr, SolveReport* report = nullptr);

/// Exact error machinery around the truncated estimator.
struct InferenceArtifacts {
  NodeSet observed;
  Eigen::MatrixXd a_hat_s;
  std::optional<Eigen::MatrixXd> a_s_true;
  /// A_S' S H B_S'S; nonnegative for valid combination matrices.
  std::optional<Eigen::MatrixXd> e_s;
  /// (I - B_S')^{-1}, rows/cols ordered like the complement of `observed`.
  std::optional<Eigen::MatrixXd> h;
  /// A^2 on all nodes.
  std::optional<Eigen::MatrixXd> b;
};

/// Computes B = A^2, H = (I - B_S')^{-1} and E_S = A_SS' H B_S'S, and records
/// a_hat_s = A_S + E_S. With S' empty, E_S is identically zero.
InferenceArtifacts error_matrix(const CombinationMatrix& a, const NodeSet& s);

struct HBoundReport {
  std::size_t checked_pairs = 0;
  /// Pairs unreachable on G with S internally disconnected.
  std::size_t vacuous_pairs = 0;
  std::size_t violations = 0;
  /// min over pairs of (rho^delta / (1 - rho^2) - h), or -h on unreachable pairs.
  double worst_slack = 0.0;
  /// max |B_S' - (A_S'S A_SS' + A_S'^2)|
  double block_identity_error = 0.0;
  /// max |B_S' - [Ã^2]_S'| where Ã has the A_S block zeroed.
  double zeroed_block_error = 0.0;

  bool ok(double tol = kMatrixTolerance) const {
    return violations == 0 && block_identity_error <= tol && zeroed_block_error <= tol;
  }
};

/// Checks h_lm <= rho^delta / (1 - rho^2) for every ordered pair of distinct
/// unobserved nodes, with delta measured on local_disconnect(g, s, s), plus
/// the block identity for B_S'.
HBoundReport h_entry_bound_check(const CombinationMatrix& a, const Graph& g, const NodeSet& s);

/// (M + M^T) / 2
template <typename Derived>
auto symmetrized(const Eigen::MatrixBase<Derived>& m) {
  return ((m + m.transpose()) / typename Derived::Scalar(2)).eval();
}

/// Pair (i, j), i < j, is connected iff the symmetrized entry exceeds eta.
Graph classify_threshold(const Eigen::MatrixXd& a_hat_s, double eta);

/// Exact optimal partition of 1-D values into two contiguous groups of the
/// sorted order.
struct TwoMeansSplit {
  /// Indices into the input, ascending by value (stable).
  std::vector<std::size_t> order;
  /// Size of the low cluster; order[low_count..] is the high cluster.
  std::size_t low_count = 0;
  double sse = 0.0;
  double low_mean = 0.0;
  double high_mean = 0.0;
  /// All values identical: no meaningful split exists.
  bool degenerate = false;

  std::vector<bool> high_membership() const;
};

/// Scans every contiguous split of the sorted values and keeps the one with
/// least within-cluster sum of squared deviations (first on ties).
/// Requires at least two values.
TwoMeansSplit optimal_two_means(std::span<const double> values);

/// Pairs in the higher-mean group of the exact 2-means split are connected.
/// Throws UnsupportedMethod for fewer than three nodes.
Graph classify_kmeans2(const Eigen::MatrixXd& a_hat_s);

struct Classifier {
  enum class Method { Threshold, KMeans2 };
  Method method = Method::KMeans2;
  double eta = 0.0;

  static Classifier threshold(double eta);
  static Classifier kmeans2() { return {}; }
};

Graph classify(const Eigen::MatrixXd& a_hat_s, const Classifier& classifier);

/// One record per unordered observed pair, ids mapped through `nodes`.
struct PairDecision {
  NodeId i;
  NodeId j;
  double score;
  bool connected;
};

std::vector<PairDecision> pair_decisions(const Eigen::MatrixXd& a_hat_s, const NodeSet& nodes,
                                         const Graph& decision);

}  // namespace tomolab

#endif  // TOMOLAB_INFERENCE_HPP
