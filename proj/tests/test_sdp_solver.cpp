#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dicf/rng.hpp"
#include "dicf/sdp.hpp"
#include "dicf/states.hpp"

using namespace dicf;
using namespace dicf::sdp;

namespace {

LabeledOperator random_herm(SplitRng& rng, const RegisterSpace& space) {
  Mat m(space.dim(), space.dim());
  for (long i = 0; i < space.dim(); ++i)
    for (long j = 0; j < space.dim(); ++j)
      m(i, j) = Cplx(2 * rng.uniform01() - 1, 2 * rng.uniform01() - 1);
  return LabeledOperator(space, 0.5 * (m + m.adjoint().eval()));
}

// maximize tr(C rho) s.t. tr(rho) = 1 on a single block.
SdpProblem eigen_toy(const RegisterSpace& space, const Mat& cost) {
  SdpProblem p;
  p.blocks = {{"rho", space}};
  Constraint c;
  c.terms.push_back({0, LinearMap::identity(space).trace_out(
                            std::set<std::string>(space.names().begin(), space.names().end()))});
  c.rhs = LabeledOperator::scalar(1.0);
  p.constraints.push_back(std::move(c));
  p.objective = {LabeledOperator(space, cost)};
  return p;
}

}  // namespace

TEST_CASE("LinearMap: adjoint identity for every primitive and for chains") {
  SplitRng rng(11);
  RegisterSpace in({"X", "A", "R"});

  auto check_adjoint = [&](const LinearMap& map) {
    for (int rep = 0; rep < 8; ++rep) {
      LabeledOperator x = random_herm(rng, map.input());
      LabeledOperator y = random_herm(rng, map.output());
      double lhs = hs_inner(map.apply(x), y);
      double rhs = hs_inner(x, map.adjoint_apply(y));
      CHECK(std::abs(lhs - rhs) < tol::kAdjoint * std::max(1.0, std::abs(lhs)));
    }
  };

  check_adjoint(LinearMap::identity(in).tensor_identity(RegisterSpace{"G", "Y"}));
  check_adjoint(LinearMap::identity(in).trace_out({"A"}));
  check_adjoint(LinearMap::identity(in).scale(-1.7));
  check_adjoint(LinearMap::identity(in).permute({"R", "X", "A"}));
  check_adjoint(LinearMap::identity(in).trace_against(random_herm(rng, in)));
  // Composite chain touching every primitive.
  check_adjoint(LinearMap::identity(in)
                    .tensor_identity(RegisterSpace{"G"})
                    .permute({"G", "X", "R", "A"})
                    .scale(0.25)
                    .trace_out({"X"})
                    .trace_against(random_herm(rng, RegisterSpace({"G", "R", "A"}))));
}

TEST_CASE("LinearMap: apply matches direct computation") {
  SplitRng rng(12);
  RegisterSpace in({"X", "A"});
  LabeledOperator x = random_herm(rng, in);

  auto tensored = LinearMap::identity(in).tensor_identity(RegisterSpace{"G"}).apply(x);
  CHECK((tensored.entries - kron(x, LabeledOperator::identity(RegisterSpace{"G"})).entries).norm() <
        1e-13);

  auto traced = LinearMap::identity(in).trace_out({"A"}).apply(x);
  CHECK((traced.entries - partial_trace(x, {"A"}).entries).norm() < 1e-13);

  LabeledOperator m = random_herm(rng, in);
  auto dotted = LinearMap::identity(in).trace_against(m).apply(x);
  CHECK(std::abs(dotted.entries(0, 0).real() - hs_inner(m, x)) < 1e-12);
}

TEST_CASE("solve: eigenvalue toy reaches the top eigenvalue") {
  Mat cost(2, 2);
  cost << 0.3, 0, 0, 0.7;
  SdpProblem p = eigen_toy(RegisterSpace{"X"}, cost);
  SolveOptions opts;
  opts.tol = 1e-9;
  SdpSolution sol = solve(p, opts);
  CHECK(sol.converged);
  CHECK(sol.objective == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(sol.equality_residual < 1e-7);
  CHECK(sol.psd_violation > -1e-9);
}

TEST_CASE("solve: adding a valid constraint never raises the value") {
  Mat cost(4, 4);
  cost.setZero();
  cost.diagonal() << 0.1, 0.2, 0.3, 0.9;
  RegisterSpace space({"X", "A"});
  SdpProblem loose = eigen_toy(space, cost);
  SolveOptions opts;
  opts.tol = 1e-9;
  double v_loose = solve(loose, opts).objective;
  CHECK(v_loose == doctest::Approx(0.9).epsilon(1e-6));

  // Nested problem: additionally fix the X-marginal to be maximally mixed.
  SdpProblem tight = loose;
  Constraint extra;
  extra.terms.push_back({0, LinearMap::identity(space).trace_out({"A"})});
  extra.rhs = LabeledOperator(RegisterSpace{"X"}, 0.5 * Mat::Identity(2, 2));
  tight.constraints.push_back(std::move(extra));
  double v_tight = solve(tight, opts).objective;
  CHECK(v_tight <= v_loose + 1e-6);
  // Half the mass is forced into the X=0 block, whose best entry is 0.2.
  CHECK(v_tight == doctest::Approx(0.55).epsilon(1e-5));
}

TEST_CASE("solve: deterministic iterate sequence") {
  Mat cost(2, 2);
  cost << 0.2, Cplx(0.1, 0.05), Cplx(0.1, -0.05), 0.9;
  SdpProblem p = eigen_toy(RegisterSpace{"X"}, cost);
  SolveOptions opts;
  opts.max_iter = 500;  // stop mid-flight; the iterates must still agree bitwise
  opts.tol = 1e-16;
  SdpSolution s1 = solve(p, opts);
  SdpSolution s2 = solve(p, opts);
  CHECK(s1.objective == s2.objective);
  CHECK(s1.equality_residual == s2.equality_residual);
  CHECK((s1.blocks[0].entries - s2.blocks[0].entries).norm() == 0.0);
}

TEST_CASE("residuals: feasible points, perturbation scaling, solver consistency") {
  Mat cost(2, 2);
  cost << 0.3, 0, 0, 0.7;
  RegisterSpace space{"X"};
  SdpProblem p = eigen_toy(space, cost);

  std::vector<LabeledOperator> feasible = {
      LabeledOperator(space, 0.5 * Mat::Identity(2, 2))};
  auto [res0, eig0] = residuals(p, feasible);
  CHECK(res0 < 1e-12);
  CHECK(eig0 >= -1e-12);
  CHECK(objective_at(p, feasible) == doctest::Approx(0.5).epsilon(1e-12));

  // Perturbing the trace by delta moves the residual linearly.
  for (double delta : {1e-3, 2e-3, 4e-3}) {
    std::vector<LabeledOperator> off = feasible;
    off[0].entries(0, 0) += delta;
    auto [res, eig] = residuals(p, off);
    CHECK(res == doctest::Approx(delta).epsilon(1e-6));
  }

  SdpSolution sol = solve(p);
  auto [res_re, eig_re] = residuals(p, sol.blocks);
  CHECK(res_re == doctest::Approx(sol.equality_residual).epsilon(1e-9));
  CHECK(eig_re == doctest::Approx(sol.psd_violation).epsilon(1e-9));
}

TEST_CASE("objective_at: zero cost and dimension mismatch") {
  RegisterSpace space{"X"};
  SdpProblem p = eigen_toy(space, Mat::Zero(2, 2));
  std::vector<LabeledOperator> point = {LabeledOperator(space, 0.5 * Mat::Identity(2, 2))};
  CHECK(objective_at(p, point) == 0.0);
  std::vector<LabeledOperator> wrong = {LabeledOperator::identity(RegisterSpace({"X", "A"}))};
  CHECK_THROWS_AS(objective_at(p, wrong), std::invalid_argument);
}

TEST_CASE("solve: contradictory constraints are reported infeasible") {
  Mat cost = Mat::Identity(2, 2);
  RegisterSpace space{"X"};
  SdpProblem p = eigen_toy(space, cost);
  Constraint dup;
  dup.terms.push_back({0, LinearMap::identity(space).trace_out({"X"})});
  dup.rhs = LabeledOperator::scalar(2.0);  // contradicts tr(rho) = 1
  p.constraints.push_back(std::move(dup));
  SolveOptions opts;
  opts.max_iter = 60000;
  SdpSolution sol = solve(p, opts);
  CHECK(sol.infeasible);
  CHECK_FALSE(sol.converged);
}

TEST_CASE("validate: unbounded problems are rejected at build time") {
  RegisterSpace space{"X"};
  SdpProblem p;
  p.blocks = {{"rho", space}};
  Constraint c;  // fixes only <sigma_z, rho>, leaving the trace free
  c.terms.push_back({0, LinearMap::identity(space).trace_against(
                            LabeledOperator(space, pauli_z()))});
  c.rhs = LabeledOperator::scalar(0.0);
  p.constraints.push_back(std::move(c));
  p.objective = {LabeledOperator::identity(space)};
  CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("trace"), std::invalid_argument);
}

TEST_CASE("json: problem and solution serialization carry the schema fields") {
  Mat cost(2, 2);
  cost << 0.3, 0, 0, 0.7;
  SdpProblem p = eigen_toy(RegisterSpace{"X"}, cost);
  auto pj = problem_to_json(p);
  CHECK(pj["schema_version"] == 1);
  CHECK(pj["blocks"][0]["name"] == "rho");
  CHECK(pj["constraints"][0]["terms"][0]["map"][0]["kind"] == "partial_trace");

  SdpSolution sol = solve(p);
  auto sj = solution_to_json(sol);
  CHECK(sj.contains("objective"));
  CHECK(sj.contains("equality_residual"));
  CHECK(sj.contains("converged"));
  CHECK(sj["blocks"].size() == 1);
}
