#include "dicf/ghz_game.hpp"

#include <stdexcept>

namespace dicf::ghz {

GhzStrategy GhzStrategy::from_pure(const LabeledVector& psi, std::array<PartyMeasurement, 3> parties) {
  return GhzStrategy{psi.outer(), std::move(parties)};
}

const std::vector<std::array<int, 3>>& valid_inputs() {
  static const std::vector<std::array<int, 3>> inputs = {
      {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}};
  return inputs;
}

bool wins(int x, int y, int z, int a, int b, int c) {
  if (((x ^ y ^ z) & 1) != 1 || x < 0 || x > 1 || y < 0 || y > 1 || z < 0 || z > 1)
    throw std::invalid_argument("wins: inputs must be bits with x^y^z = 1");
  return ((a ^ b ^ c) & 1) == ((x & y & z) ^ 1);
}

GhzStrategy honest_strategy() {
  std::array<PartyMeasurement, 3> parties;
  const std::array<std::string, 3> regs = {"H", "I", "J"};
  for (int p = 0; p < 3; ++p) {
    parties[p].regs = RegisterSpace{regs[p]};
    for (int t = 0; t < 2; ++t)
      for (int o = 0; o < 2; ++o) parties[p].proj[t][o] = meas_projector(t, o, regs[p]);
  }
  return GhzStrategy::from_pure(ghz_state(), std::move(parties));
}

namespace {

void validate(const GhzStrategy& s) {
  if (std::abs(s.state.trace() - Cplx(1.0)) > tol::kExact)
    throw std::invalid_argument("strategy state must have trace 1");
  if (!s.state.is_hermitian())
    throw std::invalid_argument("strategy state must be Hermitian");
  int total_regs = 0;
  for (const auto& party : s.parties) {
    total_regs += party.regs.num_registers();
    for (const auto& name : party.regs.names())
      if (!s.state.space.contains(name))
        throw std::invalid_argument("party register '" + name + "' not in the state");
    for (int t = 0; t < 2; ++t) {
      const auto& p0 = party.proj[t][0];
      const auto& p1 = party.proj[t][1];
      if (p0.space != party.regs || p1.space != party.regs)
        throw std::invalid_argument("projector registers must match the party's registers");
      Mat sum = p0.entries + p1.entries;
      if ((sum - Mat::Identity(sum.rows(), sum.cols())).norm() > tol::kHermitian)
        throw std::invalid_argument("party projectors must sum to identity");
    }
  }
  if (total_regs != s.state.space.num_registers())
    throw std::invalid_argument("party registers must partition the state space");
}

}  // namespace

double win_probability(const GhzStrategy& s,
                       const std::optional<std::array<double, 4>>& input_distribution) {
  validate(s);
  std::array<double, 4> dist = input_distribution.value_or(std::array<double, 4>{0.25, 0.25, 0.25, 0.25});
  double dist_sum = dist[0] + dist[1] + dist[2] + dist[3];
  if (std::abs(dist_sum - 1.0) > tol::kHermitian)
    throw std::invalid_argument("input distribution must sum to 1");

  double total = 0.0;
  const auto& inputs = valid_inputs();
  for (size_t q = 0; q < inputs.size(); ++q) {
    if (dist[q] == 0.0) continue;
    auto [x, y, z] = inputs[q];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          if (!wins(x, y, z, a, b, c)) continue;
          LabeledOperator effect =
              kron(kron(s.parties[0].proj[x][a], s.parties[1].proj[y][b]), s.parties[2].proj[z][c]);
          effect = permute_registers(effect, s.state.space.names());
          total += dist[q] * (effect.entries * s.state.entries).trace().real();
        }
  }
  if (total < -tol::kExact || total > 1.0 + tol::kExact)
    throw std::runtime_error("win probability outside [0,1]");
  return std::min(1.0, std::max(0.0, total));
}

double best_classical_value() {
  // A deterministic strategy is a response bit per input per party.
  double best = 0.0;
  for (int fa = 0; fa < 4; ++fa)
    for (int fb = 0; fb < 4; ++fb)
      for (int fc = 0; fc < 4; ++fc) {
        int won = 0;
        for (const auto& [x, y, z] : valid_inputs()) {
          int a = (fa >> x) & 1;
          int b = (fb >> y) & 1;
          int c = (fc >> z) & 1;
          if (wins(x, y, z, a, b, c)) ++won;
        }
        best = std::max(best, won / 4.0);
      }
  return best;
}

}  // namespace dicf::ghz
