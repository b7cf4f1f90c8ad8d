#pragma once

#include "dicf/operators.hpp"

namespace dicf {

// Pauli matrices on one unnamed qubit.
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();

// Measurement convention used throughout: setting 0 measures sigma_y,
// setting 1 measures sigma_x; outcome o labels the eigenvalue (-1)^o.
// With this assignment the three-box test below is won with certainty on
// the GHZ state (the sigma_x sigma_x sigma_x and mixed sigma_y pairs are
// stabilizer checks), which fixes the convention.
Mat meas_basis(int setting);

// Eigenvector of meas_basis(setting) with eigenvalue (-1)^outcome, built
// from exact {1, -1, i, -i} components over 1/sqrt(2).
LabeledVector meas_eigvec(int setting, int outcome, const std::string& reg);

// Rank-1 projector onto that eigenvector.
LabeledOperator meas_projector(int setting, int outcome, const std::string& reg = "Q");

// (|000> + |111>)/sqrt(2) on registers (H, I, J).
LabeledVector ghz_state();

// Post-measurement state of registers (I, J) after measuring register H of
// the GHZ state with meas_projector(setting, outcome). The result is
// (|00> + p|11>)/sqrt(2) with phase p from the table
//   (setting 0, outcome 0) -> -i      (setting 0, outcome 1) -> +i
//   (setting 1, outcome 0) -> +1      (setting 1, outcome 1) -> -1
// i.e. setting 0 yields the imaginary-phase Bell pair and setting 1 the
// real-phase one. Components are exact so that analytically impossible
// branch amplitudes cancel to exactly zero downstream.
LabeledVector residual_state(int setting, int outcome);

}  // namespace dicf
