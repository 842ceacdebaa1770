#include "tomolab/dynamics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

#include "tomolab/errors.hpp"

namespace tomolab {

void SimConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("SimConfig: beta must be positive");
  if (n_max < 1) throw std::invalid_argument("SimConfig: n_max must be at least 1");
  if (burn_in < 0) throw std::invalid_argument("SimConfig: burn_in must be nonnegative");
}

namespace {

Eigen::VectorXi positions(const NodeSet& within, const NodeSet& subset) {
  Eigen::VectorXi idx(static_cast<Eigen::Index>(subset.size()));
  for (std::size_t k = 0; k < subset.size(); ++k) {
    auto pos = within.index_of(subset[k]);
    if (!pos) throw std::invalid_argument("restrict_to: node outside the correlation set");
    idx(static_cast<Eigen::Index>(k)) = static_cast<int>(*pos);
  }
  return idx;
}

class NoiseSource {
 public:
  NoiseSource(Noise kind, std::uint64_t seed) : kind_(kind), rng_(seed) {}

  void fill(Eigen::VectorXd& x) {
    switch (kind_) {
      case Noise::Gaussian:
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = gauss_(rng_);
        break;
      case Noise::Rademacher:
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = coin_(rng_) ? 1.0 : -1.0;
        break;
      case Noise::UniformCentered:
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uniform_(rng_);
        break;
    }
  }

 private:
  Noise kind_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::bernoulli_distribution coin_{0.5};
  std::uniform_real_distribution<double> uniform_{-std::sqrt(3.0), std::sqrt(3.0)};
};

}  // namespace

CorrelationSet restrict_to(const CorrelationSet& corr, const NodeSet& subset) {
  const Eigen::VectorXi idx = positions(corr.node_index, subset);
  return {corr.r0(idx, idx), corr.r1(idx, idx), corr.sample_count, subset};
}

CorrelationSet analytic_correlations(const CombinationMatrix& a, double beta, const NodeSet& s) {
  s.check_within(static_cast<NodeId>(a.size()));
  const Eigen::MatrixXd& am = a.entries();
  const Eigen::Index n = am.rows();
  const Eigen::MatrixXd lyap = Eigen::MatrixXd::Identity(n, n) - am * am;
  Eigen::LLT<Eigen::MatrixXd> llt(lyap);
  if (llt.info() != Eigen::Success) {
    throw NumericError("analytic_correlations: I - A^2 is not positive definite");
  }
  const Eigen::MatrixXd r0 = (beta * beta) * llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd r1 = am * r0;

  std::vector<int> idx(s.begin(), s.end());
  return {r0(idx, idx), r1(idx, idx), 0, s};
}

CorrelationSet simulate_and_accumulate(const CombinationMatrix& a, const SimConfig& cfg,
                                       const NodeSet& s, std::ostream* raw_dump) {
  cfg.validate();
  s.check_within(static_cast<NodeId>(a.size()));
  const Eigen::MatrixXd& am = a.entries();
  const Eigen::Index n = am.rows();
  const auto k = static_cast<Eigen::Index>(s.size());
  std::vector<int> idx(s.begin(), s.end());

  NoiseSource noise(cfg.noise, cfg.seed);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd next(n);
  Eigen::VectorXd x(n);

  auto step = [&] {
    noise.fill(x);
    next.noalias() = am * y;
    next += cfg.beta * x;
    y.swap(next);
  };

  for (long t = 0; t < cfg.burn_in; ++t) step();

  Eigen::MatrixXd sum0 = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd sum1 = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd prev_obs = y(idx);
  sum0.selfadjointView<Eigen::Lower>().rankUpdate(prev_obs);

  if (raw_dump) *raw_dump << std::setprecision(17);
  auto dump = [&](long sample, const Eigen::VectorXd& obs) {
    if (!raw_dump) return;
    for (Eigen::Index q = 0; q < k; ++q) *raw_dump << sample << ',' << s[q] << ',' << obs(q) << '\n';
  };
  dump(0, prev_obs);

  Eigen::VectorXd obs(k);
  for (long t = 1; t <= cfg.n_max; ++t) {
    step();
    obs = y(idx);
    sum0.selfadjointView<Eigen::Lower>().rankUpdate(obs);
    sum1.noalias() += obs * prev_obs.transpose();
    dump(t, obs);
    prev_obs.swap(obs);
  }

  CorrelationSet out;
  out.r0 = sum0.selfadjointView<Eigen::Lower>();
  out.r0 /= static_cast<double>(cfg.n_max + 1);
  out.r1 = sum1 / static_cast<double>(cfg.n_max);
  out.sample_count = cfg.n_max;
  out.node_index = s;
  return out;
}

}  // namespace tomolab
