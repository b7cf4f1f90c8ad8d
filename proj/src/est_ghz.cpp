#include "dicf/est_ghz.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace dicf::est {

BoxEnsembleModel BoxEnsembleModel::iid(int n, double win_prob) {
  if (n < 1) throw std::invalid_argument("box model needs n >= 1");
  if (win_prob < 0.0 || win_prob > 1.0)
    throw std::invalid_argument("win probability must be in [0,1]");
  BoxEnsembleModel m;
  m.n_ = n;
  m.iid_ = true;
  m.win_prob_ = win_prob;
  return m;
}

BoxEnsembleModel BoxEnsembleModel::table(int n,
                                         std::vector<std::pair<std::uint32_t, double>> pattern_probs) {
  if (n < 1 || n > 30) throw std::invalid_argument("table model needs 1 <= n <= 30");
  double total = 0.0;
  for (const auto& [pattern, prob] : pattern_probs) {
    if (pattern >= (1u << n)) throw std::invalid_argument("pattern exceeds n bits");
    if (prob < 0.0) throw std::invalid_argument("pattern probability must be nonnegative");
    total += prob;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("pattern probabilities must sum to 1");
  BoxEnsembleModel m;
  m.n_ = n;
  m.iid_ = false;
  m.table_ = std::move(pattern_probs);
  return m;
}

double BoxEnsembleModel::pr_all_pass() const {
  if (iid_) return std::pow(win_prob_, n_);
  double p = 0.0;
  const std::uint32_t all = (1u << n_) - 1;
  for (const auto& [pattern, prob] : table_)
    if (pattern == all) p += prob;
  return p;
}

double BoxEnsembleModel::pr_pass_except(int j) const {
  if (j < 0 || j >= n_) throw std::invalid_argument("triple index out of range");
  if (iid_) return std::pow(win_prob_, n_ - 1);
  double p = 0.0;
  const std::uint32_t others = ((1u << n_) - 1) & ~(1u << j);
  for (const auto& [pattern, prob] : table_)
    if ((pattern & others) == others) p += prob;
  return p;
}

double BoxEnsembleModel::cond_expectation(int j) const {
  double denom = pr_pass_except(j);
  if (denom <= 0.0) return 1.0;
  return pr_all_pass() / denom;
}

std::uint32_t BoxEnsembleModel::sample_pattern(SplitRng& rng) const {
  if (iid_) {
    std::uint32_t pattern = 0;
    for (int i = 0; i < n_; ++i)
      if (rng.bernoulli(win_prob_)) pattern |= 1u << i;
    return pattern;
  }
  double u = rng.uniform01();
  double acc = 0.0;
  for (const auto& [pattern, prob] : table_) {
    acc += prob;
    if (u < acc) return pattern;
  }
  return table_.back().first;
}

double security_bound(int n, double eps) {
  if (n < 1) throw std::invalid_argument("security_bound: n must be >= 1");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("security_bound: eps must lie in (0,1)");
  return 1.0 / (1.0 - eps + n * eps);
}

LpSolution lp_solve(int n, int m, double eps) {
  if (n < 1) throw std::invalid_argument("lp_solve: n must be >= 1");
  if (m < 0 || m > n) throw std::invalid_argument("lp_solve: need 0 <= m <= n");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("lp_solve: eps must lie in (0,1)");
  if (m == 0) return {0.0, 0.0, 0.0};  // no bad triples: the objective is an empty sum

  // Feasible set in the (alpha, sigma) plane; objective (m*alpha + sigma)/n.
  // Lines: alpha = 0, sigma = 0, alpha + sigma = 1, sigma - ratio*alpha = 0.
  const double ratio = m * eps / (1.0 - eps);
  struct Line {
    double a, s, c;  // a*alpha + s*sigma = c
  };
  const Line lines[4] = {{1, 0, 0}, {0, 1, 0}, {1, 1, 1}, {-ratio, 1, 0}};

  auto feasible = [&](double alpha, double sigma) {
    const double slack = 1e-9;
    return alpha >= -slack && sigma >= -slack && alpha + sigma <= 1.0 + slack &&
           sigma - ratio * alpha >= -slack;
  };

  LpSolution best{-1.0, 0.0, 0.0};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      double det = lines[i].a * lines[j].s - lines[j].a * lines[i].s;
      if (std::abs(det) < 1e-14) continue;
      double alpha = (lines[i].c * lines[j].s - lines[j].c * lines[i].s) / det;
      double sigma = (lines[i].a * lines[j].c - lines[j].a * lines[i].c) / det;
      if (!feasible(alpha, sigma)) continue;
      double value = (m * alpha + sigma) / n;
      if (value > best.value) best = {value, alpha, sigma};
    }
  if (best.value < 0.0) throw std::runtime_error("lp_solve: vertex enumeration found no vertex");
  return best;
}

double lp_value(int n, int m, double eps) { return lp_solve(n, m, eps).value; }

BoxEnsembleModel extremal_distribution(int n, double eps, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("extremal_distribution: delta must be > 0");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("extremal_distribution: eps must lie in (0,1)");
  // Mass alpha on all-pass; beta on each pattern failing exactly one triple,
  // with beta/alpha a factor (1+delta) above eps/(1-eps).
  const double ratio = (1.0 + delta) * eps / (1.0 - eps);
  const double alpha = 1.0 / (1.0 + n * ratio);
  const double beta = ratio * alpha;
  std::vector<std::pair<std::uint32_t, double>> probs;
  const std::uint32_t all = (1u << n) - 1;
  probs.emplace_back(all, alpha);
  for (int j = 0; j < n; ++j) probs.emplace_back(all & ~(1u << j), beta);
  // Renormalize the last entry against accumulated rounding.
  double total = alpha + n * beta;
  probs.back().second += 1.0 - total;
  return BoxEnsembleModel::table(n, std::move(probs));
}

double exact_joint_prob(const BoxEnsembleModel& model, double eps) {
  double p = 0.0;
  for (int j = 0; j < model.n(); ++j)
    if (model.cond_expectation(j) < 1.0 - eps) p += model.pr_pass_except(j) / model.n();
  return p;
}

EstGhzReport simulate_est_ghz(const BoxEnsembleModel& model, double eps, long trials,
                              std::uint64_t seed, int jobs) {
  if (trials < 1) throw std::invalid_argument("simulate_est_ghz: trials must be >= 1");
  const int n = model.n();

  // The conclusion about the surviving triple depends only on the model, so
  // precompute which indices are bad.
  std::vector<char> bad(n);
  for (int j = 0; j < n; ++j) bad[j] = model.cond_expectation(j) < 1.0 - eps ? 1 : 0;

  auto count_range = [&](long begin, long end) {
    long hits = 0;
    for (long t = begin; t < end; ++t) {
      SplitRng rng = SplitRng::for_stream(seed, static_cast<std::uint64_t>(t));
      int j = static_cast<int>(rng.uniform_int(n));
      if (!bad[j]) continue;
      std::uint32_t pattern = model.sample_pattern(rng);
      const std::uint32_t others = ((1u << n) - 1) & ~(1u << j);
      if ((pattern & others) == others) ++hits;
    }
    return hits;
  };

  long hits = 0;
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    hits = count_range(0, trials);
  } else {
    std::vector<std::thread> pool;
    std::vector<long> partial(jobs, 0);
    long chunk = (trials + jobs - 1) / jobs;
    for (int w = 0; w < jobs; ++w) {
      long begin = w * chunk, end = std::min(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] { partial[w] = count_range(begin, end); });
    }
    for (auto& th : pool) th.join();
    for (long h : partial) hits += h;
  }

  EstGhzReport report;
  report.n = n;
  report.epsilon = eps;
  report.bound = security_bound(n, eps);
  report.lp_value_full = lp_value(n, n, eps);
  report.analytic_joint = exact_joint_prob(model, eps);
  report.empirical_joint = static_cast<double>(hits) / trials;
  report.trials = trials;
  report.seed = seed;
  return report;
}

}  // namespace dicf::est
