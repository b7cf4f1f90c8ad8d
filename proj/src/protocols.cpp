#include "dicf/protocols.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "dicf/ghz_game.hpp"
#include "dicf/states.hpp"
#include "dicf/tolerances.hpp"

namespace dicf::proto {

ProtocolId ProtocolId::parse(const std::string& name, int n) {
  ProtocolId id;
  id.n = n;
  if (name == "S" || name == "s")
    id.kind = ProtocolKind::S;
  else if (name == "W" || name == "w")
    id.kind = ProtocolKind::W;
  else if (name == "P" || name == "p")
    id.kind = ProtocolKind::P;
  else if (name == "Q" || name == "q")
    id.kind = ProtocolKind::Q;
  else
    throw std::invalid_argument("unknown protocol '" + name + "'; valid: S, W, P, Q");
  if ((id.kind == ProtocolKind::P || id.kind == ProtocolKind::Q) && n < 1)
    throw std::invalid_argument("protocols P and Q need a device count n >= 1");
  return id;
}

std::string ProtocolId::name() const {
  switch (kind) {
    case ProtocolKind::S: return "S";
    case ProtocolKind::W: return "W";
    case ProtocolKind::P: return "P";
    case ProtocolKind::Q: return "Q";
  }
  return "?";
}

PartySpec PartySpec::honest() { return PartySpec{}; }

PartySpec PartySpec::cheat(AliceCheatModel model) {
  PartySpec s;
  s.alice_model = std::move(model);
  return s;
}

PartySpec PartySpec::cheat(BobCheatModel model) {
  PartySpec s;
  s.bob_model = std::move(model);
  return s;
}

namespace {

const char* kSupportedShape =
    "supported adversary model: a pure initial state over the protocol boxes plus private "
    "ancillas, one projective product measurement on the held registers, and deterministic "
    "classical response tables";

// <bra|_reg psi, removing reg from the space.
LabeledVector contract(const LabeledVector& psi, const std::string& reg,
                       const Eigen::Vector2cd& bra) {
  const int pos = psi.space.position(reg);
  const int n = psi.space.num_registers();
  RegisterSpace out_space = psi.space.without({reg});
  const long low = 1L << (n - 1 - pos);  // stride of the contracted bit
  CVec out(out_space.dim());
  long o = 0;
  for (long base = 0; base < psi.dim(); ++base) {
    if (base & low) continue;  // visit indices with the contracted bit clear
    out(o++) = std::conj(bra(0)) * psi.entries(base) + std::conj(bra(1)) * psi.entries(base | low);
  }
  return LabeledVector(std::move(out_space), std::move(out));
}

LabeledVector contract_product(const LabeledVector& psi, const ProductBra& outcome) {
  LabeledVector cur = psi;
  for (const auto& [reg, bra] : outcome.factors) cur = contract(cur, reg, bra);
  return cur;
}

std::array<std::array<int, 2>, 2> test_pairs(int x) {
  // The two (y, z) with x ^ y ^ z = 1.
  if (x == 0) return {{{0, 1}, {1, 0}}};
  return {{{0, 0}, {1, 1}}};
}

void validate_product_povm(const std::vector<ProductBra>& povm, const std::vector<std::string>& held,
                           const LabeledVector& initial) {
  if (povm.empty()) throw std::invalid_argument(std::string("empty POVM; ") + kSupportedShape);
  RegisterSpace held_space{held};
  for (const auto& reg : held)
    if (!initial.space.contains(reg))
      throw std::invalid_argument("held register '" + reg + "' is not in the initial state");
  Mat total = Mat::Zero(held_space.dim(), held_space.dim());
  for (const auto& outcome : povm) {
    std::set<std::string> covered;
    LabeledOperator proj = LabeledOperator::identity(RegisterSpace{});
    for (const auto& [reg, bra] : outcome.factors) {
      if (!covered.insert(reg).second)
        throw std::invalid_argument("POVM outcome touches register '" + reg + "' twice");
      LabeledVector v(RegisterSpace{reg}, bra);
      proj = kron(proj, v.outer());
    }
    if (covered != std::set<std::string>(held.begin(), held.end()))
      throw std::invalid_argument(std::string("POVM outcome must cover the held registers; ") +
                                  kSupportedShape);
    total += permute_registers(proj, held_space.names()).entries;
  }
  if ((total - Mat::Identity(held_space.dim(), held_space.dim())).norm() > tol::kHermitian)
    throw std::invalid_argument(std::string("POVM does not sum to identity; ") + kSupportedShape);
}

void validate_alice_model(const AliceCheatModel& m) {
  if (std::abs(m.initial.norm() - 1.0) > tol::kExact)
    throw std::invalid_argument("adversary initial state must be normalized");
  for (const char* reg : {"H", "I", "J"})
    if (!m.initial.space.contains(reg))
      throw std::invalid_argument("initial state must include registers H, I and J");
  for (const auto& reg : m.held)
    if (reg == "I" || reg == "J")
      throw std::invalid_argument("a cheating Alice cannot hold the other side's registers");
  if (std::find(m.held.begin(), m.held.end(), "H") == m.held.end())
    throw std::invalid_argument("a cheating Alice must hold register H");
  validate_product_povm(m.povm, m.held, m.initial);
  const size_t k = m.povm.size();
  if (m.s_table.size() != k || m.x_table.size() != k || m.a_table.size() != k)
    throw std::invalid_argument("response tables must have one row per POVM outcome");
}

void validate_bob_model(const BobCheatModel& m) {
  if (std::abs(m.initial.norm() - 1.0) > tol::kExact)
    throw std::invalid_argument("adversary initial state must be normalized");
  for (const char* reg : {"H", "I", "J"})
    if (!m.initial.space.contains(reg))
      throw std::invalid_argument("initial state must include registers H, I and J");
  for (const auto& reg : m.held)
    if (reg == "H")
      throw std::invalid_argument("a cheating Bob cannot hold the other side's register");
  for (const char* reg : {"I", "J"})
    if (std::find(m.held.begin(), m.held.end(), reg) == m.held.end())
      throw std::invalid_argument("a cheating Bob must hold registers I and J");
  validate_product_povm(m.povm, m.held, m.initial);
  const size_t k = m.povm.size();
  if (m.g_table.size() != k || m.bc_table.size() != k)
    throw std::invalid_argument("response tables must have one row per POVM outcome");
}

// ---------------------------------------------------------------------------
// Branch walking shared by the exact evaluator and the sampler.

struct Branch {
  double prob = 1.0;   // classical branch probability (exact mode)
  LabeledVector psi;   // subnormalized in exact mode, normalized when sampling
  int k = -1;          // Alice's measurement record
  int j = -1;          // Bob's measurement record
  int x = -1, a = -1, r = -1, s = -1, g = -1;
};

class Chooser {
 public:
  virtual ~Chooser() = default;
  using Cont = std::function<void(Branch, int)>;
  virtual void uniform_bit(Branch br, const Cont& f) = 0;
  // residuals are subnormalized continuations of br.psi, one per outcome.
  virtual void quantum(Branch br, std::vector<LabeledVector> residuals, const Cont& f) = 0;
  virtual void terminal(const Branch& br, char outcome) = 0;
  virtual Transcript* transcript() { return nullptr; }
};

class ExactChooser : public Chooser {
 public:
  void uniform_bit(Branch br, const Cont& f) override {
    Branch b0 = br;
    b0.prob *= 0.5;
    f(std::move(b0), 0);
    br.prob *= 0.5;
    f(std::move(br), 1);
  }
  void quantum(Branch br, std::vector<LabeledVector> residuals, const Cont& f) override {
    for (size_t k = 0; k < residuals.size(); ++k) {
      Branch next = br;
      next.psi = std::move(residuals[k]);
      f(std::move(next), static_cast<int>(k));
    }
  }
  void terminal(const Branch& br, char outcome) override {
    double p = br.prob * br.psi.entries.squaredNorm();
    if (p < -tol::kProbClip) throw std::runtime_error("negative branch probability");
    if (p < tol::kProbSnap) p = 0.0;  // analytically impossible branch
    switch (outcome) {
      case 'A': dist.p_alice += p; break;
      case 'B': dist.p_bob += p; break;
      default: dist.p_abort += p; break;
    }
  }
  OutcomeDistribution dist;
};

class SampleChooser : public Chooser {
 public:
  SampleChooser(SplitRng& rng, Transcript* tr) : rng_(rng), tr_(tr) {}
  void uniform_bit(Branch br, const Cont& f) override { f(std::move(br), rng_.bit()); }
  void quantum(Branch br, std::vector<LabeledVector> residuals, const Cont& f) override {
    std::vector<double> weights(residuals.size());
    for (size_t k = 0; k < residuals.size(); ++k)
      weights[k] = residuals[k].entries.squaredNorm();
    int k = rng_.discrete(weights);
    br.psi = std::move(residuals[k]);
    if (weights[k] > 0) br.psi.entries /= std::sqrt(weights[k]);
    f(std::move(br), k);
  }
  void terminal(const Branch&, char outcome) override { outcome_ = outcome; }
  Transcript* transcript() override { return tr_; }
  char outcome() const { return outcome_; }

 private:
  SplitRng& rng_;
  Transcript* tr_;
  char outcome_ = '?';
};

void log_event(Transcript* tr, const std::string& actor, const std::string& kind,
               nlohmann::ordered_json payload) {
  if (!tr) return;
  TranscriptEvent ev;
  ev.event_index = static_cast<int>(tr->events.size());
  ev.actor = actor;
  ev.kind = kind;
  ev.payload = std::move(payload);
  tr->events.push_back(std::move(ev));
}

// The winner-decided test rounds. In protocol S the first party's tester
// always runs; in W the loser of the coin tests the winner.
void play_sw(bool is_w, const PartySpec& alice, const PartySpec& bob, Chooser& ch) {
  const bool alice_cheats = alice.alice_model.has_value();
  const bool bob_cheats = bob.bob_model.has_value();
  Transcript* tr = ch.transcript();

  Branch root;
  if (alice_cheats)
    root.psi = alice.alice_model->initial;
  else if (bob_cheats)
    root.psi = bob.bob_model->initial;
  else
    root.psi = ghz_state();
  log_event(tr, "referee", "box_transfer",
            {{"alice", {"H"}}, {"bob", {"I", "J"}}, {"state_registers", root.psi.space.names()}});

  // Bob's move: his guess, after his measurement when he is cheating.
  auto bob_move = [&, tr](Branch br, const std::function<void(Branch)>& next) {
    if (bob_cheats) {
      const auto& model = *bob.bob_model;
      std::vector<LabeledVector> residuals;
      residuals.reserve(model.povm.size());
      for (const auto& outcome : model.povm) residuals.push_back(contract_product(br.psi, outcome));
      ch.quantum(std::move(br), std::move(residuals), [&, tr](Branch b2, int j) {
        b2.j = j;
        b2.g = model.g_table[j][b2.s];
        log_event(tr, "bob", "measurement", {{"registers", model.held}, {"outcome_index", j}});
        log_event(tr, "bob", "message", {{"name", "g"}, {"value", b2.g}});
        next(std::move(b2));
      });
    } else {
      ch.uniform_bit(std::move(br), [&, tr](Branch b2, int g) {
        b2.g = g;
        log_event(tr, "bob", "message", {{"name", "g"}, {"value", g}});
        next(std::move(b2));
      });
    }
  };

  // Bob tests Alice: the reveal of a, the consistency check on s, then one
  // game round on his two boxes.
  auto bob_tests_alice = [&, tr](Branch br, char pass_outcome) {
    int a_rev = alice_cheats ? alice.alice_model->a_table[br.k][br.g] : br.a;
    log_event(tr, "alice", "message", {{"name", "a"}, {"value", a_rev}});
    if (br.s != a_rev && br.s != (a_rev ^ br.x)) {
      log_event(tr, "bob", "outcome", {{"value", "abort"}, {"reason", "message check"}});
      ch.terminal(br, '!');
      return;
    }
    ch.uniform_bit(std::move(br), [&, tr, a_rev, pass_outcome](Branch b2, int pick) {
      auto [y, z] = test_pairs(b2.x)[pick];
      std::vector<LabeledVector> rb = {contract(b2.psi, "I", meas_eigvec(y, 0, "I").entries),
                                       contract(b2.psi, "I", meas_eigvec(y, 1, "I").entries)};
      ch.quantum(std::move(b2), std::move(rb), [&, tr, a_rev, pass_outcome, y, z](Branch b3, int bout) {
        std::vector<LabeledVector> rc = {contract(b3.psi, "J", meas_eigvec(z, 0, "J").entries),
                                         contract(b3.psi, "J", meas_eigvec(z, 1, "J").entries)};
        ch.quantum(std::move(b3), std::move(rc), [&, tr, a_rev, pass_outcome, y, z, bout](Branch b4, int cout) {
          log_event(tr, "bob", "measurement",
                    {{"registers", {"I", "J"}}, {"settings", {y, z}}, {"outcomes", {bout, cout}}});
          bool pass = ghz::wins(b4.x, y, z, a_rev, bout, cout);
          log_event(tr, "bob", "outcome", {{"value", pass ? std::string(1, pass_outcome) : "abort"}});
          ch.terminal(b4, pass ? pass_outcome : '!');
        });
      });
    });
  };

  // Alice tests Bob: she names the test inputs, he answers with his box
  // outcomes (or a canned reply when cheating), she checks the game.
  auto alice_tests_bob = [&, tr](Branch br) {
    ch.uniform_bit(std::move(br), [&, tr](Branch b2, int pick) {
      auto [y, z] = test_pairs(b2.x)[pick];
      log_event(tr, "alice", "message", {{"name", "yz"}, {"value", {y, z}}});
      auto finish = [&, tr, y, z](Branch b3, int bout, int cout) {
        log_event(tr, "bob", "message", {{"name", "bc"}, {"value", {bout, cout}}});
        bool pass = ghz::wins(b3.x, y, z, b3.a, bout, cout);
        log_event(tr, "alice", "outcome", {{"value", pass ? "B" : "abort"}});
        ch.terminal(b3, pass ? 'B' : '!');
      };
      if (bob_cheats) {
        int bc = bob.bob_model->bc_table[b2.j][b2.s][b2.x][y];
        finish(std::move(b2), (bc >> 1) & 1, bc & 1);
      } else {
        std::vector<LabeledVector> rb = {contract(b2.psi, "I", meas_eigvec(y, 0, "I").entries),
                                         contract(b2.psi, "I", meas_eigvec(y, 1, "I").entries)};
        ch.quantum(std::move(b2), std::move(rb), [&, y, z, finish](Branch b3, int bout) {
          std::vector<LabeledVector> rc = {contract(b3.psi, "J", meas_eigvec(z, 0, "J").entries),
                                           contract(b3.psi, "J", meas_eigvec(z, 1, "J").entries)};
          ch.quantum(std::move(b3), std::move(rc), [&, finish, bout](Branch b4, int cout) {
            finish(std::move(b4), bout, cout);
          });
        });
      }
    });
  };

  // After the coin value c = x ^ g is known.
  auto after_announce = [&, tr](Branch br) {
    int c = br.x ^ br.g;
    if (!is_w || c == 0) {
      // Bob is the tester. If he is the cheater, the honest Alice simply
      // outputs the coin.
      if (bob_cheats) {
        log_event(tr, "alice", "outcome", {{"value", c == 0 ? "A" : "B"}});
        ch.terminal(br, c == 0 ? 'A' : 'B');
      } else {
        bob_tests_alice(std::move(br), c == 0 ? 'A' : 'B');
      }
    } else {
      // c == 1 in W: Alice is the tester; a cheating Alice never aborts.
      if (alice_cheats) {
        log_event(tr, "bob", "outcome", {{"value", "B"}});
        ch.terminal(br, 'B');
      } else {
        alice_tests_bob(std::move(br));
      }
    }
  };

  // Alice's move: operate her box, then send s.
  auto alice_move = [&, tr](Branch br, const std::function<void(Branch)>& next) {
    if (alice_cheats) {
      const auto& model = *alice.alice_model;
      std::vector<LabeledVector> residuals;
      residuals.reserve(model.povm.size());
      for (const auto& outcome : model.povm) residuals.push_back(contract_product(br.psi, outcome));
      ch.quantum(std::move(br), std::move(residuals), [&, tr](Branch b2, int k) {
        b2.k = k;
        b2.s = model.s_table[k];
        log_event(tr, "alice", "measurement", {{"registers", model.held}, {"outcome_index", k}});
        log_event(tr, "alice", "message", {{"name", "s"}, {"value", b2.s}});
        next(std::move(b2));
      });
    } else {
      ch.uniform_bit(std::move(br), [&, tr](Branch b2, int x) {
        b2.x = x;
        std::vector<LabeledVector> res = {contract(b2.psi, "H", meas_eigvec(x, 0, "H").entries),
                                          contract(b2.psi, "H", meas_eigvec(x, 1, "H").entries)};
        ch.quantum(std::move(b2), std::move(res), [&, tr](Branch b3, int a) {
          b3.a = a;
          log_event(tr, "alice", "measurement",
                    {{"registers", {"H"}}, {"setting", b3.x}, {"outcome", a}});
          ch.uniform_bit(std::move(b3), [&, tr](Branch b4, int r) {
            b4.r = r;
            b4.s = b4.a ^ (b4.x & r);
            log_event(tr, "alice", "message", {{"name", "s"}, {"value", b4.s}});
            next(std::move(b4));
          });
        });
      });
    }
  };

  alice_move(std::move(root), [&, tr](Branch br) {
    bob_move(std::move(br), [&, tr](Branch b2) {
      if (alice_cheats) b2.x = alice.alice_model->x_table[b2.k][b2.g];
      log_event(tr, "alice", "message", {{"name", "x"}, {"value", b2.x}});
      after_announce(std::move(b2));
    });
  });
}

// Loss probability of one honest game round, evaluated through the same
// amplitude contractions as the protocols. Losing amplitudes cancel exactly,
// so honest play aborts with probability exactly zero.
double honest_game_loss_exact() {
  double loss = 0.0;
  const auto ghz = ghz_state();
  for (const auto& [x, y, z] : ghz::valid_inputs())
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          if (ghz::wins(x, y, z, a, b, c)) continue;
          LabeledVector v = contract(ghz, "H", meas_eigvec(x, a, "H").entries);
          v = contract(v, "I", meas_eigvec(y, b, "I").entries);
          v = contract(v, "J", meas_eigvec(z, c, "J").entries);
          double p = 0.25 * v.entries.squaredNorm();
          loss += p < tol::kProbSnap ? 0.0 : p;
        }
  return loss;
}

void validate_specs(const PartySpec& alice, const PartySpec& bob) {
  if (alice.bob_model.has_value())
    throw std::invalid_argument(std::string("the alice argument carries a Bob-side model; ") +
                                kSupportedShape);
  if (bob.alice_model.has_value())
    throw std::invalid_argument(std::string("the bob argument carries an Alice-side model; ") +
                                kSupportedShape);
  if (alice.alice_model.has_value() && bob.bob_model.has_value())
    throw std::invalid_argument("at most one party may be adversarial in a security run");
  if (alice.alice_model) validate_alice_model(*alice.alice_model);
  if (bob.bob_model) validate_bob_model(*bob.bob_model);
}

}  // namespace

OutcomeDistribution run_exact(const ProtocolId& id, const PartySpec& alice, const PartySpec& bob) {
  validate_specs(alice, bob);
  ExactChooser chooser;
  play_sw(id.kind != ProtocolKind::S, alice, bob, chooser);
  OutcomeDistribution dist = chooser.dist;

  if (id.kind == ProtocolKind::P || id.kind == ProtocolKind::Q) {
    // Test phase over honest boxes: each of the n-1 game rounds is lost with
    // probability exactly honest_game_loss_exact().
    double pass = std::pow(1.0 - honest_game_loss_exact(), id.n - 1);
    dist.p_alice *= pass;
    dist.p_bob *= pass;
    dist.p_abort = dist.p_abort * pass + (1.0 - pass);
  }

  if (std::abs(dist.sum() - 1.0) > 1e-10)
    throw std::runtime_error("outcome distribution does not sum to 1");
  return dist;
}

std::string Transcript::to_ndjson() const {
  std::string out;
  for (const auto& ev : events) {
    nlohmann::ordered_json j;
    j["event_index"] = ev.event_index;
    j["actor"] = ev.actor;
    j["kind"] = ev.kind;
    j["payload"] = ev.payload;
    out += j.dump();
    out += '\n';
  }
  return out;
}

SelftestResult selftest_phase(int n, const est::BoxEnsembleModel& boxes, SplitRng& rng) {
  if (n < 1) throw std::invalid_argument("selftest_phase: n must be >= 1");
  if (boxes.n() != n) throw std::invalid_argument("selftest_phase: box model size mismatch");
  SelftestResult result;
  result.surviving_index = static_cast<int>(rng.uniform_int(n));
  std::uint32_t pattern = boxes.sample_pattern(rng);
  const std::uint32_t others = ((n == 32 ? ~0u : (1u << n) - 1)) & ~(1u << result.surviving_index);
  result.pass = (pattern & others) == others;
  return result;
}

namespace {

char sample_once(const ProtocolId& id, const PartySpec& alice, const PartySpec& bob, SplitRng& rng,
                 Transcript* tr) {
  log_event(tr, "referee", "setup", {{"protocol", id.name()}, {"n", id.n}});
  if (id.kind == ProtocolKind::P || id.kind == ProtocolKind::Q) {
    const bool alice_tests = id.kind == ProtocolKind::P;
    SelftestResult st = selftest_phase(id.n, est::BoxEnsembleModel::honest(id.n), rng);
    log_event(tr, alice_tests ? "alice" : "bob", "selftest",
              {{"tested", id.n - 1}, {"surviving_index", st.surviving_index}, {"pass", st.pass}});
    if (!st.pass) {
      log_event(tr, alice_tests ? "alice" : "bob", "outcome", {{"value", "abort"}});
      return '!';
    }
  }
  SampleChooser chooser(rng, tr);
  play_sw(id.kind != ProtocolKind::S, alice, bob, chooser);
  return chooser.outcome();
}

}  // namespace

SampleReport run_sampled(const ProtocolId& id, const PartySpec& alice, const PartySpec& bob,
                         long trials, std::uint64_t seed, int jobs) {
  if (trials < 1) throw std::invalid_argument("run_sampled: trials must be >= 1");
  validate_specs(alice, bob);

  auto tally_range = [&](long begin, long end, std::array<long, 3>& counts, Transcript* tr0) {
    for (long t = begin; t < end; ++t) {
      SplitRng rng = SplitRng::for_stream(seed, static_cast<std::uint64_t>(t));
      char outcome = sample_once(id, alice, bob, rng, t == 0 ? tr0 : nullptr);
      if (outcome == 'A')
        ++counts[0];
      else if (outcome == 'B')
        ++counts[1];
      else
        ++counts[2];
    }
  };

  SampleReport report;
  report.trials = trials;
  report.seed = seed;

  std::array<long, 3> counts = {0, 0, 0};
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    tally_range(0, trials, counts, &report.sample);
  } else {
    const long chunk = (trials + jobs - 1) / jobs;
    std::vector<std::array<long, 3>> partial(jobs, {0, 0, 0});
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
      long begin = w * chunk, end = std::min(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        tally_range(begin, end, partial[w], w == 0 ? &report.sample : nullptr);
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& part : partial)
      for (int i = 0; i < 3; ++i) counts[i] += part[i];
  }

  report.empirical.p_alice = static_cast<double>(counts[0]) / trials;
  report.empirical.p_bob = static_cast<double>(counts[1]) / trials;
  report.empirical.p_abort = static_cast<double>(counts[2]) / trials;
  for (auto it = report.sample.events.rbegin(); it != report.sample.events.rend(); ++it) {
    if (it->kind == "outcome") {
      report.sample.outcome = it->payload.at("value").get<std::string>();
      break;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Built-in adversaries

namespace {

AliceCheatModel alice_diagonal_model() {
  AliceCheatModel m;
  m.initial = ghz_state();
  m.held = {"H"};
  // Eigenvectors of (sigma_x + sigma_y)/sqrt(2): (1, +-(1+i)/sqrt(2))/sqrt(2).
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2cd v;
    v(0) = inv_sqrt2;
    double sign = k == 0 ? 1.0 : -1.0;
    v(1) = Cplx(sign * 0.5, sign * 0.5);
    m.povm.push_back(ProductBra{{{"H", v}}});
  }
  m.s_table = {0, 1};                  // s = k
  m.x_table = {{{0, 1}}, {{0, 1}}};    // x = g
  m.a_table = {{{0, 0}}, {{1, 1}}};    // a = k
  return m;
}

BobCheatModel bob_xy_model() {
  BobCheatModel m;
  m.initial = ghz_state();
  m.held = {"I", "J"};
  for (int bp = 0; bp < 2; ++bp)
    for (int cp = 0; cp < 2; ++cp) {
      ProductBra outcome;
      outcome.factors.push_back({"I", meas_eigvec(1, bp, "I").entries});  // sigma_x
      outcome.factors.push_back({"J", meas_eigvec(0, cp, "J").entries});  // sigma_y
      m.povm.push_back(std::move(outcome));
    }
  m.g_table.resize(4);
  m.bc_table.resize(4);
  for (int k = 0; k < 4; ++k) {
    int bp = k >> 1, cp = k & 1;
    for (int s = 0; s < 2; ++s) {
      m.g_table[k][s] = s ^ bp ^ cp;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          int z = (1 ^ x ^ y) & 1;
          int c_ans = 1 ^ s ^ (y & z);  // answer as if a were s
          m.bc_table[k][s][x][y] = c_ans;  // b = 0
        }
    }
  }
  return m;
}

}  // namespace

PartySpec adversary_alice_diagonal() { return PartySpec::cheat(alice_diagonal_model()); }
PartySpec adversary_bob_xy() { return PartySpec::cheat(bob_xy_model()); }

AliceSearchReport search_alice_diagonal_postprocessing() {
  AliceSearchReport report;
  const ProtocolId s_id{ProtocolKind::S, 1};
  const PartySpec honest = PartySpec::honest();
  const AliceCheatModel frozen = alice_diagonal_model();
  double frozen_value = run_exact(s_id, PartySpec::cheat(frozen), honest).p_alice;

  for (int s_assign = 0; s_assign < 4; ++s_assign)
    for (int x_assign = 0; x_assign < 16; ++x_assign)
      for (int a_assign = 0; a_assign < 16; ++a_assign) {
        AliceCheatModel m = frozen;
        for (int k = 0; k < 2; ++k) {
          m.s_table[k] = (s_assign >> k) & 1;
          for (int g = 0; g < 2; ++g) {
            m.x_table[k][g] = (x_assign >> (k * 2 + g)) & 1;
            m.a_table[k][g] = (a_assign >> (k * 2 + g)) & 1;
          }
        }
        double value = run_exact(s_id, PartySpec::cheat(m), honest).p_alice;
        if (value > report.best_value) {
          report.best_value = value;
          report.best = std::move(m);
        }
      }
  report.frozen_is_optimal = frozen_value >= report.best_value - 1e-12;
  return report;
}

BobSearchReport search_bob_xy_postprocessing() {
  BobSearchReport report;
  const ProtocolId s_id{ProtocolKind::S, 1};
  const PartySpec honest = PartySpec::honest();
  const BobCheatModel frozen = bob_xy_model();
  double frozen_value = run_exact(s_id, honest, PartySpec::cheat(frozen)).p_bob;

  for (int g_assign = 0; g_assign < 256; ++g_assign) {
    BobCheatModel m = frozen;
    for (int k = 0; k < 4; ++k)
      for (int s = 0; s < 2; ++s) m.g_table[k][s] = (g_assign >> (k * 2 + s)) & 1;
    double value = run_exact(s_id, honest, PartySpec::cheat(m)).p_bob;
    if (value > report.best_value) {
      report.best_value = value;
      report.best = std::move(m);
    }
  }
  report.frozen_is_optimal = frozen_value >= report.best_value - 1e-12;
  return report;
}

}  // namespace dicf::proto
