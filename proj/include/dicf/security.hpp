#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dicf/sdp.hpp"

namespace dicf::sec {

// Payoffs attached to the honest party's three outputs (0, 1, abort).
struct CheatWeights {
  double c0 = 0.0;
  double c1 = 0.0;
  double cperp = 0.0;
};

struct CheatVector {
  double v_alice = 0.0;
  double v_bob = 0.0;
  double v_abort = 0.0;
};

// Which cheating program: P_bob bounds a dishonest Bob against an honest
// Alice whose box and state are pinned by her test phase; Q_alice bounds a
// dishonest Alice against an honest Bob whose boxes are pinned by his.
enum class CheatSdp { P_bob, Q_alice };

// --- building blocks exposed for direct testing ---------------------------

// Diagonal 0/1-weighted operator from a predicate over basis bit strings.
LabeledOperator diag_by_predicate(const RegisterSpace& space,
                                  const std::function<double(const std::vector<int>&)>& weight);

// Alice's committed purification on (X, A, R, S, I, J): her uniformly random
// input and outcome, the masking bit r, s = a xor (x and r), and the two
// qubits handed to the other side.
LabeledVector alice_commit_state();

// Honest tester unitary on (Y, B, C, A, X, S, I, J, G): controlled on the
// test input y and the announced x, records the two box outcomes in B and C.
LabeledOperator bob_test_unitary();

// Branch payoff diagonal on (Y, B, C, A, X, S, I, J, G).
LabeledOperator q_branch_diag(const CheatWeights& w);

// Contract a Hermitian payoff on the 9-register space against the fixed
// |+00> ancilla through the test unitary, yielding the equivalent cost on
// (A, X, S, I, J, G).
LabeledOperator q_pullback(const LabeledOperator& payoff);

// Branch payoff diagonal on (X, A, R, G, Y, D).
LabeledOperator p_branch_diag(const CheatWeights& w);

// --- the two programs ------------------------------------------------------

sdp::SdpProblem build_sdp_P(const CheatWeights& w);
sdp::SdpProblem build_sdp_Q(const CheatWeights& w);

// Feasible points assembled from honest play; they satisfy all constraints
// to ~1e-12 and achieve objective (c0 + c1)/2.
std::vector<LabeledOperator> honest_point_P();
std::vector<LabeledOperator> honest_point_Q();

struct CheatValueResult {
  double value = 0.0;
  CheatVector vector;  // payoff-weighted components at the solution
  sdp::SdpSolution solution;
};

CheatValueResult cheat_value(CheatSdp which, const CheatWeights& w,
                             const sdp::SolveOptions& opts = {});

// Reusable workspaces: the constraint factorization is built once per
// program and kept across weight changes; solves are warm-started.
class CheatOracle {
 public:
  explicit CheatOracle(sdp::SolveOptions opts = {});
  ~CheatOracle();
  CheatValueResult value(CheatSdp which, const CheatWeights& w);
  const sdp::SolveOptions& options() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// --- cheat-vector frontier --------------------------------------------------

struct FrontierPoint {
  double target = 0.0;     // required winning probability
  double min_abort = 0.0;  // smallest abort probability compatible with it
  double residual = 0.0;
  bool converged = false;
  bool feasible = true;
};

// Largest winning probability of the cheating side (weights 0/1/0 or 1/0/0).
double max_win_probability(CheatSdp which, const sdp::SolveOptions& opts = {});

// Uniform grid from 1/2 to max_win inclusive.
std::vector<double> frontier_targets(double max_win, int points = 41);

// For each target t: minimize v_abort subject to v_win >= t, via a 1x1 PSD
// slack block s with v_win - s = t. Targets beyond the attainable maximum are
// reported infeasible; per-point solver failures do not stop the sweep.
std::vector<FrontierPoint> frontier(CheatSdp which, const std::vector<double>& targets,
                                    const sdp::SolveOptions& opts = {}, int jobs = 1);

}  // namespace dicf::sec
