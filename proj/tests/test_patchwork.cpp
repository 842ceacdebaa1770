#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "support.hpp"
#include "tomolab/errors.hpp"
#include "tomolab/patchwork.hpp"

using namespace tomolab;

namespace {

struct Setup {
  Graph g{1};
  NodeSet s;
  Graph truth{1};
  CombinationMatrix a;
};

Setup make_setup(int n, int s_size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double p = 5 * std::log(double(n)) / n;
  const NodeSet s = NodeSet::range(s_size);
  Graph truth = sample_er(s_size, p, rng);
  Graph g = sample_partial_er({n, p, s, truth}, rng);
  CombinationMatrix a = metropolis_matrix(g, {WeightRule::Metropolis, 0.8, 1.0});
  return {std::move(g), s, std::move(truth), std::move(a)};
}

PatchCatchOptions analytic_options(const Graph& truth) {
  PatchCatchOptions opt;
  opt.analytic = true;
  opt.truth = truth;
  return opt;
}

}  // namespace

TEST_CASE("make_patches") {
  SUBCASE("20 nodes, probe limit 10") {
    const PatchPlan plan = make_patches(NodeSet::range(20), 10);
    REQUIRE(plan.patches.size() == 4);
    for (const NodeSet& p : plan.patches) CHECK(p.size() == 5);
    CHECK(plan.patches[1] == NodeSet::range(5, 10));
    CHECK(plan.experiment_count() == 6);
    CHECK(plan.covered() == NodeSet::range(20));
  }
  SUBCASE("60 nodes, probe limit 10") {
    const PatchPlan plan = make_patches(NodeSet::range(60), 10);
    CHECK(plan.patches.size() == 12);
    CHECK(plan.experiment_count() == 66);
  }
  SUBCASE("remainder patch") {
    const PatchPlan plan = make_patches(NodeSet::range(7), 10);
    REQUIRE(plan.patches.size() == 2);
    CHECK(plan.patches[0].size() == 5);
    CHECK(plan.patches[1] == NodeSet{5, 6});
  }
  SUBCASE("odd probe limit rounds down") {
    CHECK(make_patches(NodeSet::range(9), 7).patches.size() == 3);
  }
  SUBCASE("non-contiguous ids keep set order") {
    const PatchPlan plan = make_patches(NodeSet{3, 8, 12, 20, 21}, 4);
    CHECK(plan.patches[1] == NodeSet{12, 20});
  }
  CHECK_THROWS_AS(make_patches(NodeSet::range(10), 3), std::invalid_argument);
  CHECK_THROWS_AS(make_patches(NodeSet{1}, 10), std::invalid_argument);
}

TEST_CASE("plan validation") {
  PatchPlan plan{{NodeSet{0, 1}, NodeSet{1, 2}}, 4};
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  plan = {{NodeSet{0, 1, 2}, NodeSet{3}}, 4};
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  plan = {{NodeSet{0, 1}, NodeSet{}}, 4};
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  plan = {{NodeSet{0, 1}, NodeSet{2, 3}}, 4};
  CHECK_NOTHROW(plan.validate());
}

TEST_CASE("graph_distance") {
  const Graph g = Graph::from_edges(4, {{0, 1}, {2, 3}});
  CHECK(graph_distance(g, g) == 0.0);
  Graph complement = Graph::complete(4);
  for (auto [i, j] : g.edges()) complement.set_edge(i, j, false);
  CHECK(graph_distance(g, complement) == 1.0);
  Graph big(60), wrong(60);
  wrong.set_edge(0, 1, true);
  wrong.set_edge(7, 40, true);
  CHECK(graph_distance(big, wrong) == doctest::Approx(2.0 / 1770));
  CHECK(graph_distance(big, wrong) == doctest::Approx(0.00113).epsilon(0.01));
  CHECK_THROWS_AS(graph_distance(Graph(3), Graph(4)), std::invalid_argument);
}

TEST_CASE("reconstruction state merges") {
  ReconstructionState st(NodeSet{2, 5, 9});
  CHECK(st.pair_count() == 3);
  CHECK(st.state(2, 5) == PairState::Undecided);
  st.merge(NodeSet{2, 5}, Graph::from_edges(2, {{0, 1}}), TieBreak::First);
  CHECK(st.state(5, 2) == PairState::Connected);
  CHECK(st.decided_count() == 1);
  // First keeps the earlier answer.
  st.merge(NodeSet{2, 5, 9}, Graph(3), TieBreak::First);
  CHECK(st.state(2, 5) == PairState::Connected);
  CHECK(st.state(2, 9) == PairState::Disconnected);
  // And demotes a pair as soon as one experiment disagrees.
  st.merge(NodeSet{2, 5}, Graph(2), TieBreak::And);
  CHECK(st.state(2, 5) == PairState::Disconnected);
  st.merge(NodeSet{2, 9}, Graph::from_edges(2, {{0, 1}}), TieBreak::And);
  CHECK(st.state(2, 9) == PairState::Disconnected);
  CHECK(st.estimated_graph() == Graph(3));
  CHECK_THROWS_AS(st.state(2, 4), std::invalid_argument);
  CHECK_THROWS_AS(st.merge(NodeSet{2, 4}, Graph(2), TieBreak::First), std::invalid_argument);
}

TEST_CASE("patch-catch probes every pair of patches in order") {
  const Setup su = make_setup(80, 20, 3);
  const PatchPlan plan = make_patches(su.s, 10);
  const ReconstructionState st = run_patch_catch(su.a, plan, analytic_options(su.truth));
  REQUIRE(st.experiment_log.size() == 6);
  const std::vector<std::pair<std::size_t, std::size_t>> order{{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}};
  for (std::size_t e = 0; e < 6; ++e) {
    CHECK(st.experiment_log[e].index == e);
    CHECK(st.experiment_log[e].patch_a == order[e].first);
    CHECK(st.experiment_log[e].patch_b == order[e].second);
    CHECK(st.experiment_log[e].nodes.size() == 10);
    REQUIRE(st.experiment_log[e].distance.has_value());
  }
  CHECK(st.decided_count() == 190);
  CHECK(st.experiment_log.back().pairs_decided == 190);
  CHECK(st.experiment_log.front().pairs_decided == 45);
  CHECK(*st.experiment_log.back().distance == graph_distance(su.truth, st.estimated_graph()));
}

TEST_CASE("every pair is decided for any valid plan") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const int s_size = std::uniform_int_distribution<int>(5, 16)(rng);
    const int m = std::uniform_int_distribution<int>(6, 10)(rng);
    const Setup su = make_setup(40, s_size, 100 + t);
    const PatchPlan plan = make_patches(su.s, m);
    if (plan.patches.size() < 2) continue;
    const ReconstructionState st = run_patch_catch(su.a, plan, analytic_options(su.truth));
    CHECK(st.decided_count() == st.pair_count());
    CHECK(st.experiment_log.size() == plan.experiment_count());
  }
}

TEST_CASE("one experiment over all of S is a direct local tomography run") {
  const Setup su = make_setup(60, 8, 5);
  const PatchPlan plan{{NodeSet::range(4), NodeSet::range(4, 8)}, 8};
  const ReconstructionState st = run_patch_catch(su.a, plan, analytic_options(su.truth));
  const Graph direct = classify_kmeans2(granger_truncated(analytic_correlations(su.a, 0.2, su.s)));
  CHECK(st.estimated_graph() == direct);

  const PatchPlan single{{NodeSet::range(8)}, 16};
  CHECK(run_patch_catch(su.a, single, analytic_options(su.truth)).estimated_graph() == direct);
}

TEST_CASE("re-running under First is idempotent") {
  const Setup su = make_setup(60, 15, 6);
  const PatchPlan plan = make_patches(su.s, 10);
  PatchCatchOptions opt;
  opt.sim.n_max = 5000;
  opt.sim.seed = 8;
  const ReconstructionState st = run_patch_catch(su.a, plan, opt);
  ReconstructionState again = st;
  for (const ExperimentRecord& r : st.experiment_log) again.merge(r.nodes, r.estimate, TieBreak::First);
  CHECK(again.estimated_graph() == st.estimated_graph());
  CHECK(run_patch_catch(su.a, plan, opt).estimated_graph() == st.estimated_graph());
}

TEST_CASE("trajectory sharing modes") {
  const Setup su = make_setup(60, 10, 7);
  const PatchPlan plan = make_patches(su.s, 10);
  PatchCatchOptions opt;
  opt.sim.n_max = 3000;
  opt.truth = su.truth;
  opt.shared_trajectory = false;
  const ReconstructionState own = run_patch_catch(su.a, plan, opt);
  CHECK(own.decided_count() == 45);
  CHECK(run_patch_catch(su.a, plan, opt).estimated_graph() == own.estimated_graph());
}

TEST_CASE("small unions are rejected") {
  const Setup su = make_setup(20, 4, 8);
  const PatchPlan plan{{NodeSet{0}, NodeSet{1}}, 4};
  CHECK_THROWS_AS(run_patch_catch(su.a, plan, analytic_options(su.truth.induced(NodeSet{0, 1}))), ConfigError);
  PatchCatchOptions opt = analytic_options(su.truth);
  CHECK_THROWS_AS(run_patch_catch(su.a, make_patches(su.s, 4), analytic_options(Graph(3))), std::invalid_argument);
  CHECK_NOTHROW(run_patch_catch(su.a, make_patches(su.s, 4), opt));
}

TEST_CASE("experiment log csv") {
  const Setup su = make_setup(40, 10, 9);
  const ReconstructionState st = run_patch_catch(su.a, make_patches(su.s, 10), analytic_options(su.truth));
  std::ostringstream out;
  write_experiment_log(out, st);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "experiment_index,patch_a,patch_b,pairs_decided,distance");
  std::getline(in, row);
  CHECK(row.rfind("0,1,0,45,", 0) == 0);
}
