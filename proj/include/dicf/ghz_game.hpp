#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dicf/operators.hpp"
#include "dicf/states.hpp"

namespace dicf::ghz {

// One party's share: the registers it holds and, per input bit, a
// two-outcome projective measurement on those registers.
struct PartyMeasurement {
  RegisterSpace regs;
  // proj[input][outcome]
  std::array<std::array<LabeledOperator, 2>, 2> proj;
};

struct GhzStrategy {
  LabeledOperator state;  // density operator; parties' registers partition its space
  std::array<PartyMeasurement, 3> parties;

  static GhzStrategy from_pure(const LabeledVector& psi, std::array<PartyMeasurement, 3> parties);
};

// The four allowed input triples, in fixed order.
const std::vector<std::array<int, 3>>& valid_inputs();

// True iff a + b + c = x*y*z + 1 mod 2. Throws if (x,y,z) is not allowed.
bool wins(int x, int y, int z, int a, int b, int c);

// GHZ state with the sigma_y / sigma_x measurements on each single-qubit party.
GhzStrategy honest_strategy();

// Winning probability under the given input distribution over valid_inputs()
// (uniform when absent). Validates the strategy and throws on malformed input.
double win_probability(const GhzStrategy& s,
                       const std::optional<std::array<double, 4>>& input_distribution = std::nullopt);

// Exhaustive maximum over deterministic classical strategies (64 response
// tables); exactly 3/4.
double best_classical_value();

}  // namespace dicf::ghz
