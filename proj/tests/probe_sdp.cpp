// Scratch probe for solver behavior on the two cheating programs. Not part
// of the test suite.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "dicf/security.hpp"

using namespace dicf;
using namespace dicf::sec;

int main(int argc, char** argv) {
  double tol = argc > 1 ? std::atof(argv[1]) : 1e-7;
  long max_iter = argc > 2 ? std::atol(argv[2]) : 200000;
  double step = argc > 3 ? std::atof(argv[3]) : 1.0;

  auto honest_p = honest_point_P();
  auto honest_q = honest_point_Q();
  {
    auto prob = build_sdp_P({0.3, 0.4, 0.2});
    auto [res, eig] = sdp::residuals(prob, honest_p);
    printf("P honest point: residual=%.3e min_eig=%.3e obj=%.9f (want %.9f)\n", res, eig,
           sdp::objective_at(prob, honest_p), (0.3 + 0.4) / 2);
  }
  {
    auto prob = build_sdp_Q({0.3, 0.4, 0.2});
    auto [res, eig] = sdp::residuals(prob, honest_q);
    printf("Q honest point: residual=%.3e min_eig=%.3e obj=%.9f (want %.9f)\n", res, eig,
           sdp::objective_at(prob, honest_q), (0.3 + 0.4) / 2);
  }

  sdp::SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.step_scale = step;

  auto run = [&](const char* name, CheatSdp which, CheatWeights w, double want) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = cheat_value(which, w, opts);
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    printf("%-18s value=%.7f (want %.6f) iters=%ld conv=%d resid=%.2e band=%.2e [%.1fs]\n", name,
           r.value, want, r.solution.iterations, int(r.solution.converged),
           r.solution.equality_residual, r.solution.objective_band, dt);
    printf("   cheat vector: vA=%.6f vB=%.6f vPerp=%.6f\n", r.vector.v_alice, r.vector.v_bob,
           r.vector.v_abort);
  };

  run("P (1,1,1)", CheatSdp::P_bob, {1, 1, 1}, 1.0);
  run("Q (1,1,1)", CheatSdp::Q_alice, {1, 1, 1}, 1.0);
  run("P (0,1,0)", CheatSdp::P_bob, {0, 1, 0}, 0.667);
  run("Q (1,0,0)", CheatSdp::Q_alice, {1, 0, 0}, 0.853553);
  return 0;
}
