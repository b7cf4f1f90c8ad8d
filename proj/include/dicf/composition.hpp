#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "dicf/security.hpp"

namespace dicf::comp {

// Which side's cheat vectors admit solver queries for a protocol summary.
enum class CheatOracleTag { none, P_bob, Q_alice };

struct ProtocolSummary {
  double p_alice_star = 0.5;
  double p_bob_star = 0.5;
  CheatOracleTag oracle = CheatOracleTag::none;
};

enum class CompositionKind { LL, PerpL, LPerp };

// (larger, smaller): the version of the protocol pointed at the round winner.
std::pair<double, double> polarise(const ProtocolSummary& s);

// Both-lenient composition of a fixed outer protocol with a polarised inner
// pair (a, b): each side's new cheating probability is its chance of seizing
// the favorable polarity times a, else b.
ProtocolSummary compose_ll(const ProtocolSummary& outer, std::pair<double, double> inner);

// Limit of iterating compose_ll; equals b / (1 - a + b) for the polarised
// base pair (a, b).
double ll_closed_form(double a, double b);

struct RoundTrace {
  int round = 0;
  double p_alice = 0.0;
  double p_bob = 0.0;
  char polarity = 'A';
  double solver_residual = 0.0;
};

struct FixpointReport {
  double value = 0.0;
  int rounds = 0;
  bool converged = false;
  std::vector<RoundTrace> trace;
};

FixpointReport ll_fixpoint(const ProtocolSummary& base, double tol = 1e-6, int max_rounds = 50);

// Injectable cheat-value query so the recursion is testable without solves.
struct CheatEval {
  double value = 0.0;
  double residual = 0.0;
  bool converged = true;
};
using CheatValueFn = std::function<CheatEval(sec::CheatSdp, const sec::CheatWeights&)>;

// Solver-backed query with a shared warm-started workspace.
CheatValueFn solver_cheat_fn(sec::CheatOracle& oracle);

// One abort-phobic composition round against the polarised inner pair (a, b).
// PerpL keeps the outer tester's abort outcome alive, so the other side's
// probability comes from the solver with payoffs (c0 = b, c1 = a, cperp = 0);
// LPerp is the mirrored case with payoffs (c0 = a, c1 = b, cperp = 0).
ProtocolSummary compose_abortphobic(CompositionKind kind, std::pair<double, double> inner,
                                    const CheatValueFn& cheat, double* residual = nullptr);

FixpointReport abortphobic_fixpoint(CompositionKind kind, const ProtocolSummary& base,
                                    const CheatValueFn& cheat, double tol = 1e-6,
                                    int max_rounds = 50);

// Alternating build: seed with the summary whose solver-visible side is
// cheapest to cheat, then iterate LPerp rounds on top of it.
FixpointReport mixed_fixpoint(const ProtocolSummary& base_p, const CheatValueFn& cheat,
                              double tol = 1e-6, int max_rounds = 50);

// Asymptotic value plus the per-round test-phase penalty: with k = lambda
// composition rounds, per-round slack 1/(n*eps), eps = 1/lambda, n = lambda^3,
// the total penalty is lambda * 1/lambda^2 = 1/lambda, clamped at 1.
double finite_lambda_bound(double asymptotic, long lambda);

struct ScfBalance {
  double cheat_prob = 0.0;
  double bias = 0.0;
};

// Balance a polarised strong-coin protocol (alpha >= beta) by flipping who
// gets the favorable polarity with a weak coin of the given cheat value.
ScfBalance balance_scf(double wcf_value, std::pair<double, double> scf);

}  // namespace dicf::comp
