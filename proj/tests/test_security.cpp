#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dicf/rng.hpp"
#include "dicf/security.hpp"
#include "dicf/states.hpp"

using namespace dicf;
using namespace dicf::sec;

namespace {

const double kCos8Sq = std::cos(M_PI / 8) * std::cos(M_PI / 8);

sdp::SolveOptions loose() {
  sdp::SolveOptions o;
  o.tol = 1e-5;
  o.max_iter = 30000;
  return o;
}

LabeledOperator random_herm(SplitRng& rng, const RegisterSpace& space) {
  Mat m(space.dim(), space.dim());
  for (long i = 0; i < space.dim(); ++i)
    for (long j = 0; j < space.dim(); ++j)
      m(i, j) = Cplx(2 * rng.uniform01() - 1, 2 * rng.uniform01() - 1);
  return LabeledOperator(space, 0.5 * (m + m.adjoint().eval()));
}

}  // namespace

TEST_CASE("branch diagonals: the three selectors partition the identity") {
  auto p_total = p_branch_diag({1, 1, 1});
  CHECK((p_total.entries - Mat::Identity(64, 64)).norm() < 1e-14);
  auto q_total = q_branch_diag({1, 1, 1});
  CHECK((q_total.entries - Mat::Identity(512, 512)).norm() < 1e-14);
  for (const auto& sel :
       {p_branch_diag({1, 0, 0}), p_branch_diag({0, 1, 0}), p_branch_diag({0, 0, 1})})
    CHECK(sel.is_projector(1e-14));
}

TEST_CASE("commit state: normalized with a unit-trace PSD marginal") {
  auto psi = alice_commit_state();
  CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  auto marg = partial_trace(psi.outer(), {"S", "I", "J"});
  CHECK(std::abs(marg.trace() - Cplx(1.0)) < 1e-12);
  CHECK(marg.is_psd(1e-10));
}

TEST_CASE("test unitary is unitary") {
  CHECK(bob_test_unitary().is_unitary(1e-10));
}

TEST_CASE("pullback: trace identity against the explicit 9-register form") {
  SplitRng rng(31);
  const RegisterSpace nine({"Y", "B", "C", "A", "X", "S", "I", "J", "G"});
  const RegisterSpace six({"A", "X", "S", "I", "J", "G"});
  const Mat u = bob_test_unitary().entries;

  // |+00><+00| on (Y, B, C).
  Mat anc = Mat::Zero(8, 8);
  anc(0, 0) = anc(0, 4) = anc(4, 0) = anc(4, 4) = 0.5;

  for (int rep = 0; rep < 3; ++rep) {
    LabeledOperator payoff = random_herm(rng, nine);
    LabeledOperator rho = psd_project(random_herm(rng, six));

    double lhs = hs_inner(q_pullback(payoff), rho);

    Mat big = kron(LabeledOperator(RegisterSpace({"Y", "B", "C"}), anc), rho).entries;
    Mat evolved = u * big * u.adjoint();
    double rhs = (payoff.entries.adjoint() * evolved).trace().real();
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("honest feasible points satisfy the constraints and score (c0+c1)/2") {
  SplitRng rng(32);
  auto hp = honest_point_P();
  auto hq = honest_point_Q();
  for (int rep = 0; rep < 3; ++rep) {
    CheatWeights w{rng.uniform01(), rng.uniform01(), rng.uniform01()};
    auto p = build_sdp_P(w);
    auto [res_p, eig_p] = sdp::residuals(p, hp);
    CHECK(res_p < 1e-10);
    CHECK(eig_p > -1e-10);
    CHECK(sdp::objective_at(p, hp) == doctest::Approx((w.c0 + w.c1) / 2).epsilon(1e-10));

    auto q = build_sdp_Q(w);
    auto [res_q, eig_q] = sdp::residuals(q, hq);
    CHECK(res_q < 1e-10);
    CHECK(eig_q > -1e-10);
    CHECK(sdp::objective_at(q, hq) == doctest::Approx((w.c0 + w.c1) / 2).epsilon(1e-10));
  }
}

TEST_CASE("all-weights-one programs evaluate to total probability 1") {
  auto rp = cheat_value(CheatSdp::P_bob, {1, 1, 1}, loose());
  CHECK(rp.value == doctest::Approx(1.0).epsilon(1e-4));
  auto rq = cheat_value(CheatSdp::Q_alice, {1, 1, 1}, loose());
  CHECK(rq.value == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("solver value dominates the honest feasible point") {
  auto r = cheat_value(CheatSdp::Q_alice, {0.6, 0.3, 0.05}, loose());
  // Honest play scores (c0+c1)/2 = 0.45; the optimum cannot be below it.
  CHECK(r.value >= 0.45 - 1e-4);
}

TEST_CASE("headline cheating values") {
  sdp::SolveOptions opts;
  opts.tol = 1e-6;
  opts.max_iter = 30000;

  auto q = cheat_value(CheatSdp::Q_alice, {1, 0, 0}, opts);
  CHECK(std::abs(q.value - kCos8Sq) < 1e-3);
  CHECK(q.vector.v_alice == doctest::Approx(q.value).epsilon(1e-6));

  auto p = cheat_value(CheatSdp::P_bob, {0, 1, 0}, opts);
  CHECK(std::abs(p.value - 0.667) < 2e-3);
  CHECK(p.vector.v_bob == doctest::Approx(p.value).epsilon(1e-6));
  // The optimal cheat keeps a visible abort exposure.
  CHECK(p.vector.v_abort > 0.01);
}

TEST_CASE("cheat_value: homogeneity in the weights") {
  auto base = cheat_value(CheatSdp::Q_alice, {0.5, 0.25, 0.1}, loose());
  auto scaled = cheat_value(CheatSdp::Q_alice, {1.5, 0.75, 0.3}, loose());
  CHECK(std::abs(scaled.value - 3.0 * base.value) < 5e-4);
}

TEST_CASE("cheat_value: convexity spot check in the weights") {
  CheatWeights w1{0.9, 0.2, 0.05};
  CheatWeights w2{0.1, 0.8, 0.4};
  CheatWeights mid{(w1.c0 + w2.c0) / 2, (w1.c1 + w2.c1) / 2, (w1.cperp + w2.cperp) / 2};
  double v1 = cheat_value(CheatSdp::Q_alice, w1, loose()).value;
  double v2 = cheat_value(CheatSdp::Q_alice, w2, loose()).value;
  double vm = cheat_value(CheatSdp::Q_alice, mid, loose()).value;
  CHECK(vm <= 0.5 * (v1 + v2) + 5e-4);
}

TEST_CASE("CheatOracle reuses its workspace across weight sweeps") {
  CheatOracle oracle(loose());
  auto r1 = oracle.value(CheatSdp::Q_alice, {1, 0, 0});
  auto r2 = oracle.value(CheatSdp::Q_alice, {0.9, 0.1, 0});
  auto r3 = oracle.value(CheatSdp::Q_alice, {1, 0, 0});
  CHECK(std::abs(r1.value - kCos8Sq) < 2e-3);
  CHECK(r3.value == doctest::Approx(r1.value).epsilon(1e-4));
  CHECK(r2.value <= r1.value + 1e-4);  // losing outcomes pay less here
}

TEST_CASE("frontier: honest target costs nothing, excessive target infeasible") {
  auto pts = frontier(CheatSdp::Q_alice, {0.5, 0.99}, loose());
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].feasible);
  CHECK(std::abs(pts[0].min_abort) < 5e-4);
  CHECK_FALSE(pts[1].feasible);  // above the attainable maximum
}

TEST_CASE("frontier: minimal abort is nondecreasing in the target") {
  sdp::SolveOptions opts = loose();
  double max_win = max_win_probability(CheatSdp::Q_alice, opts);
  CHECK(std::abs(max_win - kCos8Sq) < 2e-3);
  auto targets = frontier_targets(max_win, 5);
  CHECK(targets.size() == 5);
  CHECK(targets.front() == doctest::Approx(0.5));
  CHECK(targets.back() == doctest::Approx(max_win));
  auto pts = frontier(CheatSdp::Q_alice, targets, opts);
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    REQUIRE(pts[k].feasible);
    CHECK(pts[k + 1].min_abort >= pts[k].min_abort - 2e-4);
  }
}
