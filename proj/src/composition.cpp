#include "dicf/composition.hpp"

#include <cmath>
#include <stdexcept>

namespace dicf::comp {

std::pair<double, double> polarise(const ProtocolSummary& s) {
  return {std::max(s.p_alice_star, s.p_bob_star), std::min(s.p_alice_star, s.p_bob_star)};
}

ProtocolSummary compose_ll(const ProtocolSummary& outer, std::pair<double, double> inner) {
  auto [a, b] = inner;
  if (a < b) throw std::invalid_argument("compose_ll: inner pair must be polarised (a >= b)");
  ProtocolSummary out;
  out.p_alice_star = outer.p_alice_star * a + (1.0 - outer.p_alice_star) * b;
  out.p_bob_star = outer.p_bob_star * a + (1.0 - outer.p_bob_star) * b;
  out.oracle = CheatOracleTag::none;
  return out;
}

double ll_closed_form(double a, double b) { return b / (1.0 - a + b); }

FixpointReport ll_fixpoint(const ProtocolSummary& base, double tol, int max_rounds) {
  FixpointReport report;
  ProtocolSummary inner{polarise(base).first, polarise(base).second, CheatOracleTag::none};
  for (int round = 1; round <= max_rounds; ++round) {
    ProtocolSummary next = compose_ll(base, polarise(inner));
    report.trace.push_back({round, next.p_alice_star, next.p_bob_star,
                            next.p_alice_star >= next.p_bob_star ? 'A' : 'B', 0.0});
    bool settled = std::abs(next.p_alice_star - inner.p_alice_star) < tol &&
                   std::abs(next.p_bob_star - inner.p_bob_star) < tol &&
                   std::abs(next.p_alice_star - next.p_bob_star) < tol;
    inner = next;
    report.rounds = round;
    if (settled) {
      report.converged = true;
      break;
    }
  }
  report.value = 0.5 * (inner.p_alice_star + inner.p_bob_star);
  return report;
}

CheatValueFn solver_cheat_fn(sec::CheatOracle& oracle) {
  return [&oracle](sec::CheatSdp which, const sec::CheatWeights& w) {
    sec::CheatValueResult r = oracle.value(which, w);
    return CheatEval{r.value, r.solution.equality_residual, r.solution.converged};
  };
}

ProtocolSummary compose_abortphobic(CompositionKind kind, std::pair<double, double> inner,
                                    const CheatValueFn& cheat, double* residual) {
  auto [a, b] = inner;
  if (a < b) throw std::invalid_argument("compose_abortphobic: inner pair must be polarised");
  ProtocolSummary out;
  if (kind == CompositionKind::PerpL) {
    // Outer protocol: the Alice-tested variant. Her own cheating is bounded
    // lenient-style by her known optimum; his faces the abort-phobic payoff
    // (winning continues at a, losing at b, abort pays nothing).
    const double p_a_star = std::cos(M_PI / 8) * std::cos(M_PI / 8);
    out.p_alice_star = p_a_star * a + (1.0 - p_a_star) * b;
    CheatEval eval = cheat(sec::CheatSdp::P_bob, {b, a, 0.0});
    out.p_bob_star = eval.value;
    out.oracle = CheatOracleTag::P_bob;
    if (residual) *residual = eval.residual;
  } else if (kind == CompositionKind::LPerp) {
    const double p_b_star = 0.75;
    out.p_bob_star = p_b_star * a + (1.0 - p_b_star) * b;
    CheatEval eval = cheat(sec::CheatSdp::Q_alice, {a, b, 0.0});
    out.p_alice_star = eval.value;
    out.oracle = CheatOracleTag::Q_alice;
    if (residual) *residual = eval.residual;
  } else {
    throw std::invalid_argument("compose_abortphobic: kind must be PerpL or LPerp");
  }
  return out;
}

FixpointReport abortphobic_fixpoint(CompositionKind kind, const ProtocolSummary& base,
                                    const CheatValueFn& cheat, double tol, int max_rounds) {
  FixpointReport report;
  ProtocolSummary inner = base;
  for (int round = 1; round <= max_rounds; ++round) {
    double residual = 0.0;
    // Re-polarise every round: the imbalance may flip under this composition.
    ProtocolSummary next = compose_abortphobic(kind, polarise(inner), cheat, &residual);
    report.trace.push_back({round, next.p_alice_star, next.p_bob_star,
                            next.p_alice_star >= next.p_bob_star ? 'A' : 'B', residual});
    bool settled = std::abs(next.p_alice_star - inner.p_alice_star) < tol &&
                   std::abs(next.p_bob_star - inner.p_bob_star) < tol;
    inner = next;
    report.rounds = round;
    if (settled) {
      report.converged = true;
      break;
    }
  }
  report.value = std::max(inner.p_alice_star, inner.p_bob_star);
  return report;
}

FixpointReport mixed_fixpoint(const ProtocolSummary& base_p, const CheatValueFn& cheat, double tol,
                              int max_rounds) {
  return abortphobic_fixpoint(CompositionKind::LPerp, base_p, cheat, tol, max_rounds);
}

double finite_lambda_bound(double asymptotic, long lambda) {
  if (lambda < 1) throw std::invalid_argument("finite_lambda_bound: lambda must be >= 1");
  return std::min(1.0, asymptotic + 1.0 / static_cast<double>(lambda));
}

ScfBalance balance_scf(double wcf_value, std::pair<double, double> scf) {
  auto [alpha, beta] = scf;
  if (alpha < beta) throw std::invalid_argument("balance_scf: need alpha >= beta");
  if (wcf_value < 0.5 || wcf_value > 1.0 || beta < 0.5 || alpha > 1.0)
    throw std::invalid_argument("balance_scf: inputs must lie in [1/2, 1]");
  ScfBalance out;
  out.cheat_prob = beta + wcf_value * (alpha - beta);
  out.bias = out.cheat_prob - 0.5;
  return out;
}

}  // namespace dicf::comp
