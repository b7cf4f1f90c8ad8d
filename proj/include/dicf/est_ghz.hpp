#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dicf/rng.hpp"

namespace dicf::est {

// Joint distribution over pass/fail patterns of n box triples. Bit i of a
// pattern is 1 when triple i wins its game. Either i.i.d. with a common
// winning probability or an explicit sparse table.
class BoxEnsembleModel {
 public:
  static BoxEnsembleModel honest(int n) { return iid(n, 1.0); }
  static BoxEnsembleModel iid(int n, double win_prob);
  static BoxEnsembleModel table(int n, std::vector<std::pair<std::uint32_t, double>> pattern_probs);

  int n() const { return n_; }
  bool is_iid() const { return iid_; }
  double iid_win_prob() const { return win_prob_; }
  const std::vector<std::pair<std::uint32_t, double>>& support() const { return table_; }

  double pr_all_pass() const;
  double pr_pass_except(int j) const;  // all triples other than j pass
  // E[X_j | J = j, all others passed]; 1 when the conditioning event is null.
  double cond_expectation(int j) const;

  std::uint32_t sample_pattern(SplitRng& rng) const;

 private:
  int n_ = 0;
  bool iid_ = true;
  double win_prob_ = 1.0;
  std::vector<std::pair<std::uint32_t, double>> table_;
};

// Closed-form bound on Pr[test passes and the surviving triple is bad]:
// 1 / (1 - eps + n*eps).
double security_bound(int n, double eps);

struct LpSolution {
  double value = 0.0;
  double alpha = 0.0;  // probability that every triple passes
  double sigma = 0.0;  // total probability of exactly-one-failure patterns
};

// The two-variable program behind the bound, solved by enumerating the
// vertices of {alpha, sigma >= 0, alpha + sigma <= 1, sigma >= m*eps/(1-eps)*alpha}
// with objective (m*alpha + sigma)/n. Equals m / (n*(1 - eps + m*eps)).
LpSolution lp_solve(int n, int m, double eps);
double lp_value(int n, int m, double eps);

// Near-tight family: mass on the all-pass pattern and on each single-failure
// pattern, with the failure weights a factor (1+delta) above the threshold
// ratio so every triple's conditional expectation sits strictly below 1-eps.
BoxEnsembleModel extremal_distribution(int n, double eps, double delta);

// Pr[all tested triples pass and the surviving one is bad], by direct
// summation over the model.
double exact_joint_prob(const BoxEnsembleModel& model, double eps);

struct EstGhzReport {
  int n = 0;
  double epsilon = 0.0;
  double bound = 0.0;           // security_bound(n, eps)
  double lp_value_full = 0.0;   // lp_value(n, n, eps)
  double analytic_joint = 0.0;  // exact_joint_prob for the model
  double empirical_joint = 0.0;
  long trials = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of the joint probability: sample the surviving index
// and a pass pattern per trial.
EstGhzReport simulate_est_ghz(const BoxEnsembleModel& model, double eps, long trials,
                              std::uint64_t seed, int jobs = 1);

}  // namespace dicf::est
