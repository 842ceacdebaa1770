#include "tomolab/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tomolab {

Eigen::MatrixXd granger_full(const CorrelationSet& corr, SolveReport* report) {
  const auto n = static_cast<NodeId>(corr.node_index.size());
  if (corr.node_index != NodeSet::range(n)) {
    throw std::invalid_argument("granger_full: correlations must cover every node 0..n-1");
  }
  return granger_estimate(corr.r1, corr.r0, report);
}

Eigen::MatrixXd granger_truncated(const CorrelationSet& corr, SolveReport* report) {
  return granger_estimate(corr.r1, corr.r0, report);
}

InferenceArtifacts error_matrix(const CombinationMatrix& a, const NodeSet& s) {
  const auto n = static_cast<NodeId>(a.size());
  s.check_within(n);
  const NodeSet hidden = s.complement(n);
  const std::vector<int> obs(s.begin(), s.end());
  const std::vector<int> hid(hidden.begin(), hidden.end());
  const Eigen::MatrixXd& am = a.entries();

  InferenceArtifacts out;
  out.observed = s;
  out.b = am * am;
  out.a_s_true = am(obs, obs);
  const auto k = static_cast<Eigen::Index>(obs.size());

  if (hid.empty()) {
    out.h = Eigen::MatrixXd(0, 0);
    out.e_s = Eigen::MatrixXd::Zero(k, k);
  } else {
    const auto m = static_cast<Eigen::Index>(hid.size());
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(m, m) - (*out.b)(hid, hid);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    out.h = lu.inverse();
    out.e_s = am(obs, hid) * (*out.h) * (*out.b)(hid, obs);
  }
  out.a_hat_s = *out.a_s_true + *out.e_s;
  return out;
}

HBoundReport h_entry_bound_check(const CombinationMatrix& a, const Graph& g, const NodeSet& s) {
  const auto n = static_cast<NodeId>(a.size());
  if (g.size() != n) throw std::invalid_argument("h_entry_bound_check: graph and matrix sizes differ");
  s.check_within(n);
  const NodeSet hidden = s.complement(n);
  const std::vector<int> obs(s.begin(), s.end());
  const std::vector<int> hid(hidden.begin(), hidden.end());
  const Eigen::MatrixXd& am = a.entries();

  HBoundReport report;
  if (hid.empty()) return report;

  const InferenceArtifacts art = error_matrix(a, s);
  const Eigen::MatrixXd& h = *art.h;
  const Eigen::MatrixXd b_hidden = (*art.b)(hid, hid);

  const Eigen::MatrixXd via_blocks = am(hid, obs) * am(obs, hid) + am(hid, hid) * am(hid, hid);
  report.block_identity_error = (b_hidden - via_blocks).cwiseAbs().maxCoeff();

  Eigen::MatrixXd zeroed = am;
  zeroed(obs, obs).setZero();
  const Eigen::MatrixXd b_zeroed = zeroed * zeroed;
  report.zeroed_block_error = (b_hidden - b_zeroed(hid, hid)).cwiseAbs().maxCoeff();

  const Graph reference = local_disconnect(g, s, s);
  const double rho = a.rho();
  const double scale = 1.0 / (1.0 - rho * rho);
  report.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < hid.size(); ++p) {
    const auto dist = distances_from(reference, hid[p]);
    for (std::size_t q = 0; q < hid.size(); ++q) {
      if (p == q) continue;
      const double h_pq = h(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
      double slack;
      if (const Hops& d = dist[hid[q]]; d) {
        slack = std::pow(rho, *d) * scale - h_pq;
      } else {
        ++report.vacuous_pairs;
        slack = -h_pq;
      }
      ++report.checked_pairs;
      if (slack < -kMatrixTolerance) ++report.violations;
      report.worst_slack = std::min(report.worst_slack, slack);
    }
  }
  if (report.checked_pairs == 0) report.worst_slack = 0.0;
  return report;
}

Graph classify_threshold(const Eigen::MatrixXd& a_hat_s, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("classify_threshold: eta must be positive");
  if (a_hat_s.rows() != a_hat_s.cols() || a_hat_s.rows() == 0) {
    throw std::invalid_argument("classify_threshold: matrix must be square and nonempty");
  }
  const Eigen::MatrixXd sym = symmetrized(a_hat_s);
  const auto k = static_cast<NodeId>(sym.rows());
  Graph g(k);
  for (NodeId i = 0; i < k; ++i)
    for (NodeId j = i + 1; j < k; ++j)
      if (sym(i, j) > eta) g.set_edge(i, j, true);
  return g;
}

std::vector<bool> TwoMeansSplit::high_membership() const {
  std::vector<bool> high(order.size(), false);
  if (degenerate) return high;
  for (std::size_t r = low_count; r < order.size(); ++r) high[order[r]] = true;
  return high;
}

TwoMeansSplit optimal_two_means(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("optimal_two_means: need at least two values");
  TwoMeansSplit out;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });

  const double lo = values[out.order.front()];
  const double hi = values[out.order.back()];
  const double center = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  if (lo == hi) {
    out.degenerate = true;
    out.low_count = n;
    out.low_mean = out.high_mean = lo;
    return out;
  }

  // Prefix sums of centered values keep the SSE differences well conditioned.
  std::vector<double> sum(n + 1, 0.0), sq(n + 1, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double v = values[out.order[r]] - center;
    sum[r + 1] = sum[r] + v;
    sq[r + 1] = sq[r] + v * v;
  }
  auto sse = [&](std::size_t from, std::size_t to) {
    const double cnt = static_cast<double>(to - from);
    const double s1 = sum[to] - sum[from];
    return std::max(0.0, (sq[to] - sq[from]) - s1 * s1 / cnt);
  };

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) {
    // Never separate equal values.
    if (values[out.order[k - 1]] == values[out.order[k]]) continue;
    const double total = sse(0, k) + sse(k, n);
    if (total < best) {
      best = total;
      out.low_count = k;
    }
  }
  out.sse = best;
  out.low_mean = center + (sum[out.low_count] - sum[0]) / static_cast<double>(out.low_count);
  out.high_mean = center + (sum[n] - sum[out.low_count]) / static_cast<double>(n - out.low_count);
  return out;
}

Graph classify_kmeans2(const Eigen::MatrixXd& a_hat_s) {
  if (a_hat_s.rows() != a_hat_s.cols()) throw std::invalid_argument("classify_kmeans2: matrix must be square");
  const auto k = static_cast<NodeId>(a_hat_s.rows());
  if (k < 3) {
    throw UnsupportedMethod("2-means needs at least three observed nodes; use the threshold classifier");
  }
  const Eigen::MatrixXd sym = symmetrized(a_hat_s);
  std::vector<double> values;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  values.reserve(static_cast<std::size_t>(k) * (k - 1) / 2);
  for (NodeId i = 0; i < k; ++i)
    for (NodeId j = i + 1; j < k; ++j) {
      values.push_back(sym(i, j));
      pairs.emplace_back(i, j);
    }
  const TwoMeansSplit split = optimal_two_means(values);
  const std::vector<bool> high = split.high_membership();
  Graph g(k);
  for (std::size_t q = 0; q < pairs.size(); ++q)
    if (high[q]) g.set_edge(pairs[q].first, pairs[q].second, true);
  return g;
}

Classifier Classifier::threshold(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("Classifier: eta must be positive and finite");
  return {Method::Threshold, eta};
}

Graph classify(const Eigen::MatrixXd& a_hat_s, const Classifier& classifier) {
  return classifier.method == Classifier::Method::Threshold ? classify_threshold(a_hat_s, classifier.eta)
                                                            : classify_kmeans2(a_hat_s);
}

std::vector<PairDecision> pair_decisions(const Eigen::MatrixXd& a_hat_s, const NodeSet& nodes,
                                         const Graph& decision) {
  const auto k = static_cast<NodeId>(nodes.size());
  if (a_hat_s.rows() != k || decision.size() != k) {
    throw std::invalid_argument("pair_decisions: size mismatch");
  }
  const Eigen::MatrixXd sym = symmetrized(a_hat_s);
  std::vector<PairDecision> out;
  for (NodeId i = 0; i < k; ++i)
    for (NodeId j = i + 1; j < k; ++j) out.push_back({nodes[i], nodes[j], sym(i, j), decision.connected(i, j)});
  return out;
}

}  // namespace tomolab
