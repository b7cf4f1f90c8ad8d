#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicf/est_ghz.hpp"
#include "dicf/operators.hpp"
#include "dicf/rng.hpp"

namespace dicf::proto {

enum class ProtocolKind { S, W, P, Q };

struct ProtocolId {
  ProtocolKind kind = ProtocolKind::S;
  int n = 1;  // device count for the test phase of P and Q

  static ProtocolId parse(const std::string& name, int n = 1);
  std::string name() const;
};

struct OutcomeDistribution {
  double p_alice = 0.0;
  double p_bob = 0.0;
  double p_abort = 0.0;
  double sum() const { return p_alice + p_bob + p_abort; }
};

// One POVM outcome as a product of single-qubit bras; the factor registers
// of every outcome must cover exactly the party's held registers.
struct ProductBra {
  std::vector<std::pair<std::string, Eigen::Vector2cd>> factors;
};

// Measure-and-respond cheating Alice: one projective measurement on her held
// registers when she operates her box, then classical response tables.
struct AliceCheatModel {
  LabeledVector initial;                    // pure joint state incl. H, I, J
  std::vector<std::string> held;            // registers she measures (H + ancillas)
  std::vector<ProductBra> povm;             // K outcomes
  std::vector<int> s_table;                 // [k] -> first message
  std::vector<std::array<int, 2>> x_table;  // [k][g] -> announced input
  std::vector<std::array<int, 2>> a_table;  // [k][g] -> revealed outcome
};

// Measure-and-respond cheating Bob: measures his boxes up front, picks the
// guess from what he saw, and answers a possible later test classically.
struct BobCheatModel {
  LabeledVector initial;
  std::vector<std::string> held;            // registers he measures (I, J + ancillas)
  std::vector<ProductBra> povm;
  std::vector<std::array<int, 2>> g_table;  // [k][s] -> guess
  // [k][s][x][y] -> (b<<1)|c answered to the test inputs (y, z=1^x^y)
  std::vector<std::array<std::array<std::array<int, 2>, 2>, 2>> bc_table;
};

struct PartySpec {
  static PartySpec honest();
  static PartySpec cheat(AliceCheatModel model);
  static PartySpec cheat(BobCheatModel model);

  bool is_honest() const { return !alice_model.has_value() && !bob_model.has_value(); }
  std::optional<AliceCheatModel> alice_model;
  std::optional<BobCheatModel> bob_model;
};

// The two explicit cheating strategies with honest GHZ boxes.
//
// Alice measures along the diagonal xy-direction (sigma_x + sigma_y)/sqrt(2),
// then plays the table found by exhaustive search: s = k, x = g, a = k.
PartySpec adversary_alice_diagonal();
// Bob measures his first box along sigma_x and the second along sigma_y,
// guesses g = s ^ b' ^ c', and answers a later test as if a were s.
PartySpec adversary_bob_xy();

// Exact outcome distribution of one protocol execution: all classical
// branches are enumerated and every measurement is evaluated on the joint
// state; no sampling. At most one party may be adversarial.
OutcomeDistribution run_exact(const ProtocolId& id, const PartySpec& alice, const PartySpec& bob);

struct TranscriptEvent {
  int event_index = 0;
  std::string actor;  // "alice", "bob" or "referee"
  std::string kind;   // "setup", "box_transfer", "message", "measurement", "selftest", "outcome"
  nlohmann::ordered_json payload;
};

struct Transcript {
  std::vector<TranscriptEvent> events;
  std::string outcome;  // "A", "B" or "abort"
  std::string to_ndjson() const;
};

struct SampleReport {
  OutcomeDistribution empirical;
  long trials = 0;
  std::uint64_t seed = 0;
  Transcript sample;  // transcript of trial 0
};

// Seeded Monte Carlo over the same branch logic; per-trial streams derive
// from (seed, trial index), so the result is independent of job count.
SampleReport run_sampled(const ProtocolId& id, const PartySpec& alice, const PartySpec& bob,
                         long trials, std::uint64_t seed, int jobs = 1);

struct SelftestResult {
  bool pass = false;
  int surviving_index = 0;
};

// Test phase: pick a surviving triple uniformly, play the game with the other
// n-1, pass iff they all win.
SelftestResult selftest_phase(int n, const est::BoxEnsembleModel& boxes, SplitRng& rng);

// Exhaustive searches over the classical post-processing of the two built-in
// strategies, maximizing the cheater's value in protocol S. The frozen
// tables in the adversaries above attain these maxima.
struct AliceSearchReport {
  double best_value = 0.0;
  AliceCheatModel best;
  bool frozen_is_optimal = false;
};
AliceSearchReport search_alice_diagonal_postprocessing();

struct BobSearchReport {
  double best_value = 0.0;
  BobCheatModel best;
  bool frozen_is_optimal = false;
};
BobSearchReport search_bob_xy_postprocessing();

}  // namespace dicf::proto
