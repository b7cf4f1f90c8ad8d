#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dicf/operators.hpp"
#include "dicf/rng.hpp"
#include "dicf/states.hpp"

using namespace dicf;

namespace {

Mat random_hermitian(SplitRng& rng, long d) {
  Mat m(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j)
      m(i, j) = Cplx(2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0);
  Mat h = 0.5 * (m + m.adjoint().eval());
  return h;
}

LabeledOperator op2(const std::string& reg, const Mat& m) {
  return LabeledOperator(RegisterSpace{reg}, m);
}

}  // namespace

TEST_CASE("kron: identities, Pauli action, label clash") {
  auto ix = LabeledOperator::identity(RegisterSpace{"X"});
  auto ia = LabeledOperator::identity(RegisterSpace{"A"});
  auto prod = kron(ix, ia);
  CHECK(prod.dim() == 4);
  CHECK((prod.entries - Mat::Identity(4, 4)).norm() == doctest::Approx(0.0).epsilon(1e-15));

  auto xx = kron(op2("X", pauli_x()), op2("A", pauli_x()));
  CVec v00 = CVec::Zero(4);
  v00(0) = 1.0;
  CVec out = xx.entries * v00;
  CHECK(std::abs(out(3) - Cplx(1.0)) < tol::kExact);  // |00> -> |11>
  CHECK(out.head(3).norm() < tol::kExact);

  CHECK_THROWS_AS(kron(ix, LabeledOperator::identity(RegisterSpace{"X"})), std::invalid_argument);
}

TEST_CASE("kron: trace is multiplicative on random Hermitians") {
  SplitRng rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    auto a = op2("X", random_hermitian(rng, 2));
    auto b = op2("A", random_hermitian(rng, 2));
    Cplx expected = a.trace() * b.trace();  // direct multiplication oracle
    CHECK(std::abs(kron(a, b).trace() - expected) < 1e-12);
  }
}

TEST_CASE("partial_trace: Bell state, GHZ marginal, scalar case") {
  CVec bell = CVec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  auto rho = LabeledVector(RegisterSpace{"I", "J"}, bell).outer();
  auto half = partial_trace(rho, {"J"});
  CHECK((half.entries - 0.5 * Mat::Identity(2, 2)).norm() < tol::kExact);

  auto ghz_red = partial_trace(ghz_state().outer(), {"H"});
  Mat expect = Mat::Zero(4, 4);
  expect(0, 0) = expect(3, 3) = 0.5;  // (|00><00| + |11><11|)/2
  CHECK((ghz_red.entries - expect).norm() < tol::kExact);
  CHECK(ghz_red.space == RegisterSpace({"I", "J"}));

  auto scalar = partial_trace(rho, {"I", "J"});
  CHECK(scalar.dim() == 1);
  CHECK(std::abs(scalar.entries(0, 0) - rho.trace()) < tol::kExact);

  CHECK_THROWS_AS(partial_trace(rho, {"Z"}), std::invalid_argument);
}

TEST_CASE("partial_trace: trace preservation and drop-set composition") {
  SplitRng rng(42);
  RegisterSpace space({"X", "A", "R", "G"});
  for (int rep = 0; rep < 20; ++rep) {
    LabeledOperator op(space, random_hermitian(rng, space.dim()));
    CHECK(std::abs(partial_trace(op, {"A", "G"}).trace() - op.trace()) < tol::kExact);
    auto seq = partial_trace(partial_trace(op, {"A"}), {"G"});
    auto joint = partial_trace(op, {"A", "G"});
    CHECK((seq.entries - joint.entries).norm() < tol::kExact);
  }
}

TEST_CASE("ghz_state: norm and stabilizer checks") {
  auto ghz = ghz_state();
  CHECK(std::abs(ghz.norm() - 1.0) < tol::kExact);

  auto xxx = kron(kron(op2("H", pauli_x()), op2("I", pauli_x())), op2("J", pauli_x()));
  CHECK((xxx.entries * ghz.entries - ghz.entries).norm() < tol::kExact);

  // sigma_y^3 maps the state to an orthogonal one: expectation 0, not -1.
  auto yyy = kron(kron(op2("H", pauli_y()), op2("I", pauli_y())), op2("J", pauli_y()));
  Cplx overlap = (ghz.entries.adjoint() * (yyy.entries * ghz.entries))(0, 0);
  CHECK(std::abs(overlap) < tol::kExact);
}

TEST_CASE("meas_projector: completeness, idempotence, |+><+|") {
  for (int t = 0; t < 2; ++t) {
    auto p0 = meas_projector(t, 0);
    auto p1 = meas_projector(t, 1);
    CHECK((p0.entries + p1.entries - Mat::Identity(2, 2)).norm() < tol::kExact);
    for (const auto& p : {p0, p1}) {
      CHECK(p.is_projector(1e-12));
      CHECK(p.is_hermitian(1e-12));
    }
    // Eigenvalue check: M v = (-1)^o v.
    for (int o = 0; o < 2; ++o) {
      auto v = meas_eigvec(t, o, "Q");
      double want = o == 0 ? 1.0 : -1.0;
      CHECK((meas_basis(t) * v.entries - want * v.entries).norm() < tol::kExact);
    }
  }
  Mat plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  CHECK((meas_projector(1, 0).entries - plus).norm() < tol::kExact);
}

TEST_CASE("residual_state: orthogonality, no-signalling, phase table") {
  for (int t = 0; t < 2; ++t) {
    auto r0 = residual_state(t, 0);
    auto r1 = residual_state(t, 1);
    CHECK(std::abs((r0.entries.adjoint() * r1.entries)(0, 0)) < tol::kExact);

    // Sum over outcomes of prob * residual density == marginal of GHZ.
    Mat mix = Mat::Zero(4, 4);
    for (int o = 0; o < 2; ++o) {
      auto proj = meas_projector(t, o, "H");
      auto big = kron(proj, LabeledOperator::identity(RegisterSpace{"I", "J"}));
      Mat sub = big.entries * ghz_state().outer().entries * big.entries;
      mix += partial_trace(LabeledOperator(RegisterSpace({"H", "I", "J"}), sub), {"H"}).entries;
    }
    Mat expect = Mat::Zero(4, 4);
    expect(0, 0) = expect(3, 3) = 0.5;
    CHECK((mix - expect).norm() < tol::kExact);

    // The residual equals the renormalized projection of GHZ.
    for (int o = 0; o < 2; ++o) {
      CVec proj_amp = CVec::Zero(4);
      auto v = meas_eigvec(t, o, "H");
      const auto& g = ghz_state().entries;
      for (int ij = 0; ij < 4; ++ij)
        proj_amp(ij) = std::conj(v.entries(0)) * g(ij) + std::conj(v.entries(1)) * g(4 + ij);
      proj_amp /= proj_amp.norm();
      CHECK((proj_amp - residual_state(t, o).entries).norm() < tol::kExact);
    }
  }

  // |11> amplitude modulus for (setting=1, outcome=0).
  CHECK(std::abs(std::abs(residual_state(1, 0).entries(3)) - 1.0 / std::sqrt(2.0)) < tol::kExact);

  // Phase table: setting 0 -> -i, +i; setting 1 -> +1, -1.
  const Cplx i(0, 1);
  CHECK(std::abs(residual_state(0, 0).entries(3) / residual_state(0, 0).entries(0) - (-i)) < tol::kExact);
  CHECK(std::abs(residual_state(0, 1).entries(3) / residual_state(0, 1).entries(0) - i) < tol::kExact);
  CHECK(std::abs(residual_state(1, 0).entries(3) / residual_state(1, 0).entries(0) - Cplx(1)) < tol::kExact);
  CHECK(std::abs(residual_state(1, 1).entries(3) / residual_state(1, 1).entries(0) - Cplx(-1)) < tol::kExact);
}

TEST_CASE("hermitian_eig: spectra and round trip") {
  auto z = op2("X", pauli_z());
  auto [vals, vecs] = hermitian_eig(z);
  CHECK(vals(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(vals(1) == doctest::Approx(1.0).epsilon(1e-14));

  auto [pvals, pvecs] = hermitian_eig(meas_projector(0, 1));
  CHECK(std::abs(pvals(0)) < 1e-12);
  CHECK(std::abs(pvals(1) - 1.0) < 1e-12);

  SplitRng rng(43);
  for (int rep = 0; rep < 10; ++rep) {
    RegisterSpace space({"X", "A", "R"});
    LabeledOperator m(space, random_hermitian(rng, 8));
    auto [l, v] = hermitian_eig(m);
    Mat rebuilt = v * l.asDiagonal() * v.adjoint();
    CHECK((rebuilt - m.entries).norm() <= tol::kEigRoundTrip * std::max(1.0, m.frobenius_norm()));
    for (int k = 1; k < l.size(); ++k) CHECK(l(k) >= l(k - 1));
  }

  Mat bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(hermitian_eig(op2("X", bad)), std::invalid_argument);
}

TEST_CASE("psd_project: clipping, fixed points, idempotence") {
  Mat d(2, 2);
  d << 1, 0, 0, -1;
  auto proj = psd_project(op2("X", d));
  Mat want(2, 2);
  want << 1, 0, 0, 0;
  CHECK((proj.entries - want).norm() < tol::kExact);

  auto neg = psd_project(op2("X", Mat(-Mat::Identity(2, 2))));
  CHECK(neg.entries.norm() < tol::kExact);

  SplitRng rng(44);
  for (int rep = 0; rep < 10; ++rep) {
    LabeledOperator m(RegisterSpace({"X", "A"}), random_hermitian(rng, 4));
    auto once = psd_project(m);
    if (m.is_psd(1e-12)) CHECK((once.entries - m.entries).norm() < 1e-12);
    auto twice = psd_project(once);
    CHECK((twice.entries - once.entries).norm() < 1e-10);
    auto [vals, vecs] = hermitian_eig(once);
    CHECK(vals.minCoeff() >= -tol::kExact);
  }
}

TEST_CASE("permute_registers: kron associativity and round trip") {
  SplitRng rng(45);
  auto a = op2("X", random_hermitian(rng, 2));
  auto b = op2("A", random_hermitian(rng, 2));
  auto c = op2("R", random_hermitian(rng, 2));

  auto left = kron(kron(a, b), c);
  auto right = kron(a, kron(b, c));
  CHECK((left.entries - right.entries).norm() < tol::kPermute);

  // (b (x) a) (x) c reordered back equals a (x) b (x) c.
  auto swapped = kron(kron(b, a), c);
  auto restored = permute_registers(swapped, {"X", "A", "R"});
  CHECK((restored.entries - left.entries).norm() < tol::kPermute);

  auto forward = permute_registers(left, {"R", "X", "A"});
  auto back = permute_registers(forward, {"X", "A", "R"});
  CHECK((back.entries - left.entries).norm() == doctest::Approx(0.0).epsilon(tol::kPermute));

  auto canon = to_canonical(permute_registers(left, {"R", "A", "X"}));
  CHECK(canon.space == RegisterSpace({"X", "A", "R"}));
  CHECK((canon.entries - left.entries).norm() < tol::kPermute);
}
