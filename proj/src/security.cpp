#include "dicf/security.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "dicf/states.hpp"

namespace dicf::sec {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

LabeledOperator basis_proj(int bit, const std::string& reg) {
  Mat m = Mat::Zero(2, 2);
  m(bit, bit) = 1.0;
  return LabeledOperator(RegisterSpace{reg}, std::move(m));
}

std::vector<int> bits_of(long idx, int n) {
  std::vector<int> bits(n);
  for (int k = 0; k < n; ++k) bits[k] = static_cast<int>((idx >> (n - 1 - k)) & 1);
  return bits;
}

int ghz_pass(int x, int y, int a, int d) {
  int z = (1 ^ x ^ y) & 1;
  return ((a ^ d ^ 1) & 1) == (x & y & z) ? 1 : 0;
}

}  // namespace

LabeledOperator diag_by_predicate(const RegisterSpace& space,
                                  const std::function<double(const std::vector<int>&)>& weight) {
  Mat m = Mat::Zero(space.dim(), space.dim());
  for (long idx = 0; idx < space.dim(); ++idx)
    m(idx, idx) = weight(bits_of(idx, space.num_registers()));
  return LabeledOperator(space, std::move(m));
}

LabeledVector alice_commit_state() {
  RegisterSpace space({"X", "A", "R", "S", "I", "J"});
  CVec psi = CVec::Zero(space.dim());
  const double amp = 1.0 / (2.0 * std::sqrt(2.0));
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) {
      const CVec& resid = residual_state(x, a).entries;
      for (int r = 0; r < 2; ++r) {
        int s = a ^ (x & r);
        long base = ((((long(x) * 2 + a) * 2 + r) * 2 + s)) * 4;
        for (int ij = 0; ij < 4; ++ij) psi(base + ij) += amp * resid(ij);
      }
    }
  return LabeledVector(std::move(space), std::move(psi));
}

LabeledOperator bob_test_unitary() {
  const RegisterSpace out_space({"Y", "B", "C", "A", "X", "S", "I", "J", "G"});
  LabeledOperator u = LabeledOperator::zero(out_space);
  LabeledOperator xb(RegisterSpace{"B"}, pauli_x());
  LabeledOperator xc(RegisterSpace{"C"}, pauli_x());
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) {
      int z = (1 ^ y ^ x) & 1;
      LabeledOperator f_bi = kron(LabeledOperator::identity(RegisterSpace{"B"}),
                                  meas_projector(y, 0, "I"));
      f_bi.entries += kron(xb, meas_projector(y, 1, "I")).entries;
      LabeledOperator f_cj = kron(LabeledOperator::identity(RegisterSpace{"C"}),
                                  meas_projector(z, 0, "J"));
      f_cj.entries += kron(xc, meas_projector(z, 1, "J")).entries;
      LabeledOperator term = kron(basis_proj(y, "Y"), f_bi);
      term = kron(term, f_cj);
      term = kron(term, basis_proj(x, "X"));
      term = kron(term, LabeledOperator::identity(RegisterSpace{"A", "S", "G"}));
      // built on (Y, B, I, C, J, X, A, S, G)
      u.entries += permute_registers(term, out_space.names()).entries;
    }
  return u;
}

LabeledOperator q_branch_diag(const CheatWeights& w) {
  RegisterSpace space({"Y", "B", "C", "A", "X", "S", "I", "J", "G"});
  return diag_by_predicate(space, [&w](const std::vector<int>& t) {
    int y = t[0], b = t[1], c = t[2], a = t[3], x = t[4], s = t[5], g = t[8];
    if (((x ^ g) & 1) == 1) return w.c1;
    bool s_ok = (s == a) || (s == (a ^ x));
    int z = (1 ^ x ^ y) & 1;
    bool ghz_ok = ((a ^ b ^ c ^ 1) & 1) == (x & y & z);
    return (s_ok && ghz_ok) ? w.c0 : w.cperp;
  });
}

LabeledOperator q_pullback(const LabeledOperator& payoff) {
  const RegisterSpace nine({"Y", "B", "C", "A", "X", "S", "I", "J", "G"});
  if (payoff.space != nine)
    throw std::invalid_argument("q_pullback: payoff must live on (Y,B,C,A,X,S,I,J,G)");
  static const Mat u = bob_test_unitary().entries;  // fixed; built once

  // W = U (|+00>_YBC (x) I): the 512x64 isometry the ancilla preparation
  // induces. Column q of V has entries 1/sqrt(2) at rows (y,0,0,q).
  Mat v = Mat::Zero(512, 64);
  for (long q = 0; q < 64; ++q) {
    v(q, q) = kInvSqrt2;          // y = 0
    v(256 + q, q) = kInvSqrt2;    // y = 1
  }
  static const Mat w_iso = u * v;

  Mat m = w_iso.adjoint() * payoff.entries * w_iso;
  m = 0.5 * (m + m.adjoint().eval());
  return LabeledOperator(RegisterSpace({"A", "X", "S", "I", "J", "G"}), std::move(m));
}

LabeledOperator p_branch_diag(const CheatWeights& w) {
  RegisterSpace space({"X", "A", "R", "G", "Y", "D"});
  return diag_by_predicate(space, [&w](const std::vector<int>& t) {
    int x = t[0], a = t[1], g = t[3], y = t[4], d = t[5];
    if (((x ^ g) & 1) == 0) return w.c0;
    return ghz_pass(x, y, a, d) ? w.c1 : w.cperp;
  });
}

sdp::SdpProblem build_sdp_P(const CheatWeights& w) {
  const RegisterSpace rho2_space({"X", "A", "R", "G"});
  const RegisterSpace rho3_space({"X", "A", "R", "G", "Y", "D"});

  sdp::SdpProblem p;
  p.blocks = {{"rho2", rho2_space}, {"rho3", rho3_space}};

  LabeledOperator commit = partial_trace(alice_commit_state().outer(), {"S", "I", "J"});

  // What the other side receives is pinned: discarding the guess register
  // recovers Alice's committed marginal.
  sdp::Constraint c1;
  c1.terms.push_back({0, sdp::LinearMap::identity(rho2_space).trace_out({"G"})});
  c1.rhs = commit;
  p.constraints.push_back(std::move(c1));

  // The test input is uniform and independent: discarding the response
  // register of the later state recovers the earlier one with I_Y/2 attached.
  sdp::Constraint c2;
  c2.terms.push_back({1, sdp::LinearMap::identity(rho3_space).trace_out({"D"})});
  c2.terms.push_back(
      {0, sdp::LinearMap::identity(rho2_space).tensor_identity(RegisterSpace{"Y"}).scale(-0.5)});
  c2.rhs = LabeledOperator::zero(RegisterSpace({"X", "A", "R", "G", "Y"}));
  p.constraints.push_back(std::move(c2));

  p.objective = {LabeledOperator::zero(rho2_space), p_branch_diag(w)};
  return p;
}

sdp::SdpProblem build_sdp_Q(const CheatWeights& w) {
  const RegisterSpace rho1_space({"S", "I", "J"});
  const RegisterSpace rho2_space({"A", "X", "S", "I", "J", "G"});

  sdp::SdpProblem q;
  q.blocks = {{"rho1", rho1_space}, {"rho2", rho2_space}};

  LabeledOperator rho0 = partial_trace(ghz_state().outer(), {"H"});

  sdp::Constraint c1;
  c1.terms.push_back({0, sdp::LinearMap::identity(rho1_space).trace_out({"S"})});
  c1.rhs = rho0;
  q.constraints.push_back(std::move(c1));

  sdp::Constraint c2;
  c2.terms.push_back({1, sdp::LinearMap::identity(rho2_space).trace_out({"A", "X"})});
  c2.terms.push_back(
      {0, sdp::LinearMap::identity(rho1_space).tensor_identity(RegisterSpace{"G"}).scale(-0.5)});
  c2.rhs = LabeledOperator::zero(RegisterSpace({"S", "I", "J", "G"}));
  q.constraints.push_back(std::move(c2));

  q.objective = {LabeledOperator::zero(rho1_space), q_pullback(q_branch_diag(w))};
  return q;
}

std::vector<LabeledOperator> honest_point_P() {
  LabeledOperator commit = partial_trace(alice_commit_state().outer(), {"S", "I", "J"});
  LabeledOperator rho2 = kron(commit, LabeledOperator::identity(RegisterSpace{"G"}));
  rho2.entries *= 0.5;

  const LabeledOperator psi = alice_commit_state().outer();
  const RegisterSpace rho3_space({"X", "A", "R", "G", "Y", "D"});
  LabeledOperator rho3 = LabeledOperator::zero(rho3_space);
  for (int g = 0; g < 2; ++g)
    for (int y = 0; y < 2; ++y)
      for (int d = 0; d < 2; ++d) {
        // Honest response: measure the two held qubits with settings (y, z)
        // where z is fixed by the announced data, then report the parity d.
        int z = (y ^ g) & 1;
        LabeledOperator kraus = LabeledOperator::zero(RegisterSpace({"I", "J"}));
        for (int b = 0; b < 2; ++b) {
          int c = (d ^ b) & 1;
          kraus.entries += kron(meas_projector(y, b, "I"), meas_projector(z, c, "J")).entries;
        }
        LabeledOperator embedded =
            kron(LabeledOperator::identity(RegisterSpace({"X", "A", "R", "S"})), kraus);
        Mat sandwich = embedded.entries * psi.entries * embedded.entries;
        LabeledOperator marg = partial_trace(
            LabeledOperator(psi.space, std::move(sandwich)), {"S", "I", "J"});
        LabeledOperator tagged = kron(kron(kron(marg, basis_proj(g, "G")), basis_proj(y, "Y")),
                                      basis_proj(d, "D"));
        rho3.entries += 0.25 * tagged.entries;
      }
  return {std::move(rho2), std::move(rho3)};
}

std::vector<LabeledOperator> honest_point_Q() {
  LabeledOperator rho1 = LabeledOperator::zero(RegisterSpace({"S", "I", "J"}));
  LabeledOperator rho2 = LabeledOperator::zero(RegisterSpace({"A", "X", "S", "I", "J", "G"}));
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) {
      LabeledOperator resid = residual_state(x, a).outer();
      for (int r = 0; r < 2; ++r) {
        int s = a ^ (x & r);
        LabeledOperator s_resid = kron(basis_proj(s, "S"), resid);
        rho1.entries += 0.125 * s_resid.entries;
        for (int g = 0; g < 2; ++g) {
          LabeledOperator full =
              kron(kron(kron(basis_proj(a, "A"), basis_proj(x, "X")), s_resid), basis_proj(g, "G"));
          rho2.entries += 0.0625 * full.entries;
        }
      }
    }
  return {std::move(rho1), std::move(rho2)};
}

namespace {

CheatVector extract_vector(CheatSdp which, const std::vector<LabeledOperator>& blocks) {
  CheatVector v;
  if (which == CheatSdp::P_bob) {
    v.v_alice = hs_inner(p_branch_diag({1, 0, 0}), blocks[1]);
    v.v_bob = hs_inner(p_branch_diag({0, 1, 0}), blocks[1]);
    v.v_abort = hs_inner(p_branch_diag({0, 0, 1}), blocks[1]);
  } else {
    static const LabeledOperator sel_a = q_pullback(q_branch_diag({1, 0, 0}));
    static const LabeledOperator sel_b = q_pullback(q_branch_diag({0, 1, 0}));
    static const LabeledOperator sel_p = q_pullback(q_branch_diag({0, 0, 1}));
    v.v_alice = hs_inner(sel_a, blocks[1]);
    v.v_bob = hs_inner(sel_b, blocks[1]);
    v.v_abort = hs_inner(sel_p, blocks[1]);
  }
  return v;
}

std::vector<LabeledOperator> objective_for(CheatSdp which, const CheatWeights& w) {
  if (which == CheatSdp::P_bob)
    return {LabeledOperator::zero(RegisterSpace({"X", "A", "R", "G"})), p_branch_diag(w)};
  return {LabeledOperator::zero(RegisterSpace({"S", "I", "J"})), q_pullback(q_branch_diag(w))};
}

}  // namespace

CheatValueResult cheat_value(CheatSdp which, const CheatWeights& w, const sdp::SolveOptions& opts) {
  sdp::SdpProblem problem = which == CheatSdp::P_bob ? build_sdp_P(w) : build_sdp_Q(w);
  sdp::SdpSolver solver(std::move(problem));
  CheatValueResult result;
  result.solution = solver.solve(opts);
  result.value = result.solution.objective;
  result.vector = extract_vector(which, result.solution.blocks);
  return result;
}

struct CheatOracle::Impl {
  sdp::SolveOptions opts;
  std::optional<sdp::SdpSolver> p_solver, q_solver;
  Eigen::VectorXd warm_p, warm_q;
};

CheatOracle::CheatOracle(sdp::SolveOptions opts) : impl_(std::make_unique<Impl>()) {
  impl_->opts = opts;
}

CheatOracle::~CheatOracle() = default;

const sdp::SolveOptions& CheatOracle::options() const { return impl_->opts; }

CheatValueResult CheatOracle::value(CheatSdp which, const CheatWeights& w) {
  auto& solver = which == CheatSdp::P_bob ? impl_->p_solver : impl_->q_solver;
  auto& warm = which == CheatSdp::P_bob ? impl_->warm_p : impl_->warm_q;
  if (!solver)
    solver.emplace(which == CheatSdp::P_bob ? build_sdp_P(w) : build_sdp_Q(w));
  else
    solver->set_objective(objective_for(which, w));
  CheatValueResult result;
  result.solution = solver->solve(impl_->opts, &warm);
  result.value = result.solution.objective;
  result.vector = extract_vector(which, result.solution.blocks);
  return result;
}

double max_win_probability(CheatSdp which, const sdp::SolveOptions& opts) {
  CheatWeights w = which == CheatSdp::P_bob ? CheatWeights{0, 1, 0} : CheatWeights{1, 0, 0};
  return cheat_value(which, w, opts).value;
}

std::vector<double> frontier_targets(double max_win, int points) {
  if (points < 2) throw std::invalid_argument("frontier_targets: need at least two points");
  std::vector<double> targets(points);
  for (int k = 0; k < points; ++k)
    targets[k] = 0.5 + (max_win - 0.5) * k / (points - 1);
  return targets;
}

namespace {

// Frontier program: base constraints plus  <win, rho> - s = t  with a 1x1
// slack block, objective -<abort, rho>.
sdp::SdpProblem frontier_problem(CheatSdp which, double target) {
  sdp::SdpProblem base = which == CheatSdp::P_bob ? build_sdp_P({0, 0, 0}) : build_sdp_Q({0, 0, 0});
  LabeledOperator win, abort_sel;
  if (which == CheatSdp::P_bob) {
    win = p_branch_diag({0, 1, 0});
    abort_sel = p_branch_diag({0, 0, 1});
  } else {
    win = q_pullback(q_branch_diag({1, 0, 0}));
    abort_sel = q_pullback(q_branch_diag({0, 0, 1}));
  }
  base.blocks.push_back({"slack", RegisterSpace{}});
  base.objective[1] = abort_sel;
  base.objective[1].entries *= -1.0;
  base.objective.push_back(LabeledOperator::zero(RegisterSpace{}));

  sdp::Constraint win_floor;
  win_floor.terms.push_back({1, sdp::LinearMap::identity(base.blocks[1].space).trace_against(win)});
  win_floor.terms.push_back({2, sdp::LinearMap::identity(RegisterSpace{}).scale(-1.0)});
  win_floor.rhs = LabeledOperator::scalar(target);
  base.constraints.push_back(std::move(win_floor));
  return base;
}

}  // namespace

std::vector<FrontierPoint> frontier(CheatSdp which, const std::vector<double>& targets,
                                    const sdp::SolveOptions& opts, int jobs) {
  for (double t : targets)
    if (t < 0.0 || t > 1.0)
      throw std::invalid_argument("frontier: targets must be probabilities");

  const double max_win = max_win_probability(which, opts);
  std::vector<FrontierPoint> points(targets.size());

  auto run_range = [&](size_t begin, size_t end) {
    sdp::SdpSolver solver(frontier_problem(which, 0.5));
    const int floor_index = static_cast<int>(solver.problem().constraints.size()) - 1;
    Eigen::VectorXd warm;
    for (size_t k = begin; k < end; ++k) {
      FrontierPoint& pt = points[k];
      pt.target = targets[k];
      if (pt.target > max_win + 5e-3) {
        pt.feasible = false;
        continue;
      }
      solver.set_constraint_rhs(floor_index, LabeledOperator::scalar(pt.target));
      try {
        sdp::SdpSolution sol = solver.solve(opts, &warm);
        pt.min_abort = -sol.objective;
        pt.residual = sol.equality_residual;
        pt.converged = sol.converged;
        pt.feasible = !sol.infeasible;
      } catch (const std::exception&) {
        pt.converged = false;
        pt.feasible = false;
      }
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1 || targets.size() <= 1) {
    run_range(0, targets.size());
  } else {
    size_t workers = std::min<size_t>(jobs, targets.size());
    std::vector<std::thread> pool;
    size_t chunk = (targets.size() + workers - 1) / workers;
    for (size_t wk = 0; wk < workers; ++wk) {
      size_t begin = wk * chunk;
      size_t end = std::min(targets.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return points;
}

}  // namespace dicf::sec
