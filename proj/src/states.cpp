#include "dicf/states.hpp"

#include <cmath>
#include <stdexcept>

namespace dicf {

namespace {
const Cplx kI(0.0, 1.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_bit(int v, const char* what) {
  if (v != 0 && v != 1) throw std::invalid_argument(std::string(what) + " must be 0 or 1");
}
}  // namespace

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat pauli_y() {
  Mat m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Mat meas_basis(int setting) {
  check_bit(setting, "setting");
  return setting == 0 ? pauli_y() : pauli_x();
}

LabeledVector meas_eigvec(int setting, int outcome, const std::string& reg) {
  check_bit(setting, "setting");
  check_bit(outcome, "outcome");
  CVec v(2);
  v(0) = kInvSqrt2;
  double sign = outcome == 0 ? 1.0 : -1.0;
  // sigma_y eigenvectors (1, +-i)/sqrt(2); sigma_x eigenvectors (1, +-1)/sqrt(2).
  v(1) = setting == 0 ? sign * kI * kInvSqrt2 : Cplx(sign * kInvSqrt2);
  return LabeledVector(RegisterSpace{reg}, std::move(v));
}

LabeledOperator meas_projector(int setting, int outcome, const std::string& reg) {
  return meas_eigvec(setting, outcome, reg).outer();
}

LabeledVector ghz_state() {
  CVec v = CVec::Zero(8);
  v(0) = kInvSqrt2;
  v(7) = kInvSqrt2;
  return LabeledVector(RegisterSpace{"H", "I", "J"}, std::move(v));
}

LabeledVector residual_state(int setting, int outcome) {
  check_bit(setting, "setting");
  check_bit(outcome, "outcome");
  CVec v = CVec::Zero(4);
  v(0) = kInvSqrt2;
  if (setting == 0) {
    // conj(<1|y_outcome>) picks up -i for outcome 0, +i for outcome 1.
    v(3) = (outcome == 0 ? -kI : kI) * kInvSqrt2;
  } else {
    v(3) = Cplx(outcome == 0 ? kInvSqrt2 : -kInvSqrt2);
  }
  return LabeledVector(RegisterSpace{"I", "J"}, std::move(v));
}

}  // namespace dicf
