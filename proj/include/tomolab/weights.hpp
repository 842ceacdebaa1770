#ifndef TOMOLAB_WEIGHTS_HPP
#define TOMOLAB_WEIGHTS_HPP

#include <iosfwd>

#include <Eigen/Dense>

#include "tomolab/graph.hpp"

namespace tomolab {

enum class WeightRule { Laplacian, Metropolis };

struct PolicyParams {
  WeightRule rule = WeightRule::Metropolis;
  double rho = 0.8;
  /// Laplacian only.
  double lambda = 1.0;

  void validate() const;
};

/// Absolute tolerance for symmetry, nonnegativity and row-sum checks.
inline constexpr double kMatrixTolerance = 1e-12;

/// Symmetric nonnegative weight matrix whose row sums do not exceed rho.
/// The stability factor rho is absorbed into the entries.
class CombinationMatrix {
 public:
  /// Validating constructor for user-supplied matrices: square, symmetric,
  /// entrywise nonnegative, every row sum <= rho (all to kMatrixTolerance).
  /// Throws std::invalid_argument otherwise.
  CombinationMatrix(Eigen::MatrixXd entries, double rho);

  const Eigen::MatrixXd& entries() const { return entries_; }
  double rho() const { return rho_; }
  Eigen::Index size() const { return entries_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  /// Graph whose off-diagonal edges are the strictly positive entries.
  Graph support() const;

 private:
  Eigen::MatrixXd entries_;
  double rho_;
};

CombinationMatrix laplacian_matrix(const Graph& g, const PolicyParams& params);
CombinationMatrix metropolis_matrix(const Graph& g, const PolicyParams& params);
/// Dispatches on params.rule.
CombinationMatrix combination_matrix(const Graph& g, const PolicyParams& params);

/// tau_L = rho * lambda / e, tau_M = rho / e.
double class_tau(const PolicyParams& params);

/// True iff a_ij >= gamma * g_ij / d_max(g) for every i != j, with slack
/// down to -kMatrixTolerance.
bool check_lemma2_bound(const CombinationMatrix& a, const Graph& g, double gamma);

/// Row per line, comma separated, 17 significant digits.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace tomolab

#endif  // TOMOLAB_WEIGHTS_HPP
