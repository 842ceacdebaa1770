#include "tomolab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace tomolab {

void PolicyParams::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
  if (rule == WeightRule::Laplacian && !(lambda > 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("lambda must lie in (0,1]");
  }
}

CombinationMatrix::CombinationMatrix(Eigen::MatrixXd entries, double rho)
    : entries_(std::move(entries)), rho_(rho) {
  if (!(rho_ > 0.0 && rho_ < 1.0)) throw std::invalid_argument("CombinationMatrix: rho must lie in (0,1)");
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw std::invalid_argument("CombinationMatrix: matrix must be square and nonempty");
  }
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > kMatrixTolerance) {
    throw std::invalid_argument("CombinationMatrix: matrix is not symmetric");
  }
  if (entries_.minCoeff() < -kMatrixTolerance) {
    throw std::invalid_argument("CombinationMatrix: negative entry");
  }
  const double max_row = entries_.rowwise().sum().maxCoeff();
  if (max_row > rho_ + kMatrixTolerance) {
    throw std::invalid_argument("CombinationMatrix: row sum " + std::to_string(max_row) +
                                " exceeds rho");
  }
}

Graph CombinationMatrix::support() const {
  const auto n = static_cast<NodeId>(entries_.rows());
  Graph g(n);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (entries_(i, j) > 0.0) g.set_edge(i, j, true);
  return g;
}

CombinationMatrix laplacian_matrix(const Graph& g, const PolicyParams& params) {
  params.validate();
  const NodeId n = g.size();
  const double d_max = g.max_degree();
  const double w = params.lambda / d_max;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId i = 0; i < n; ++i) {
    double off = 0.0;
    for (NodeId j = 0; j < n; ++j) {
      if (j != i && g.connected(i, j)) {
        a(i, j) = params.rho * w;
        off += 1.0;
      }
    }
    a(i, i) = params.rho * (1.0 - w * off);
  }
  return CombinationMatrix(std::move(a), params.rho);
}

CombinationMatrix metropolis_matrix(const Graph& g, const PolicyParams& params) {
  params.validate();
  const NodeId n = g.size();
  std::vector<int> deg(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) deg[i] = g.degree(i);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId i = 0; i < n; ++i) {
    double off = 0.0;
    for (NodeId j = 0; j < n; ++j) {
      if (j != i && g.connected(i, j)) {
        const double w = 1.0 / std::max(deg[i], deg[j]);
        a(i, j) = params.rho * w;
        off += w;
      }
    }
    a(i, i) = params.rho * (1.0 - off);
  }
  return CombinationMatrix(std::move(a), params.rho);
}

CombinationMatrix combination_matrix(const Graph& g, const PolicyParams& params) {
  return params.rule == WeightRule::Laplacian ? laplacian_matrix(g, params)
                                              : metropolis_matrix(g, params);
}

double class_tau(const PolicyParams& params) {
  params.validate();
  const double gamma = params.rule == WeightRule::Laplacian ? params.rho * params.lambda : params.rho;
  return gamma / std::numbers::e;
}

bool check_lemma2_bound(const CombinationMatrix& a, const Graph& g, double gamma) {
  if (a.size() != g.size()) throw std::invalid_argument("check_lemma2_bound: size mismatch");
  const double d_max = g.max_degree();
  const NodeId n = g.size();
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (i != j && g.connected(i, j) && a(i, j) - gamma / d_max < -kMatrixTolerance) return false;
  return true;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace tomolab
