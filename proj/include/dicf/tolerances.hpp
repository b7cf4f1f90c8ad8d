#pragma once

// Central numeric tolerances. Every module compares against these rather
// than sprinkling literals through the code.

namespace dicf::tol {

// Exact-math checks (trace preservation, normalization, probability sums).
inline constexpr double kExact = 1e-12;

// Hermiticity / POVM completeness checks on inputs.
inline constexpr double kHermitian = 1e-10;

// Eigendecomposition round-trip: ||V L V^dag - M||_F <= kEigRoundTrip * max(1, ||M||_F).
inline constexpr double kEigRoundTrip = 1e-9;

// Register permutation round-trips.
inline constexpr double kPermute = 1e-14;

// Adjoint identity <L(X),Y> == <X,L*(Y)> on random inputs.
inline constexpr double kAdjoint = 1e-10;

// Branch probabilities below this are numerical zeros (amplitudes that
// cancel analytically); they are snapped to 0 so impossible events report
// probability exactly 0. Genuine probabilities in the protocols are >= 2^-10.
inline constexpr double kProbSnap = 1e-20;

// Most-negative branch probability tolerated before declaring a bug.
inline constexpr double kProbClip = 1e-10;

}  // namespace dicf::tol
