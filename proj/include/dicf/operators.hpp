#pragma once

#include <Eigen/Dense>
#include <complex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dicf/registers.hpp"
#include "dicf/tolerances.hpp"

namespace dicf {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// A dense complex matrix tagged with the ordered register list it acts on.
struct LabeledOperator {
  RegisterSpace space;
  Mat entries;

  LabeledOperator() : entries(1, 1) { entries(0, 0) = 0.0; }
  LabeledOperator(RegisterSpace s, Mat m);

  static LabeledOperator zero(const RegisterSpace& s);
  static LabeledOperator identity(const RegisterSpace& s);
  // 1x1 operator on the empty register space (scalars, e.g. slack blocks).
  static LabeledOperator scalar(Cplx value);

  long dim() const { return space.dim(); }
  Cplx trace() const { return entries.trace(); }
  double frobenius_norm() const { return entries.norm(); }

  bool is_hermitian(double tol = tol::kHermitian) const;
  bool is_psd(double tol = tol::kHermitian) const;
  bool is_projector(double tol = tol::kHermitian) const;
  bool is_unitary(double tol = tol::kHermitian) const;
};

// A dense complex vector over named registers.
struct LabeledVector {
  RegisterSpace space;
  CVec entries;

  LabeledVector() : entries(1) { entries(0) = 0.0; }
  LabeledVector(RegisterSpace s, CVec v);

  long dim() const { return space.dim(); }
  double norm() const { return entries.norm(); }
  LabeledOperator outer() const;  // |v><v|
};

// Hilbert-Schmidt inner product Re tr(A^dag B) (A, B Hermitian in practice).
double hs_inner(const LabeledOperator& a, const LabeledOperator& b);

// Kronecker product on disjoint register sets; result register list is the
// concatenation (left factor most significant).
LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b);
LabeledVector kron(const LabeledVector& a, const LabeledVector& b);

// Trace out the named registers; preserves trace.
LabeledOperator partial_trace(const LabeledOperator& op, const std::set<std::string>& drop);

// Reorder registers; `order` must be a permutation of the operator's labels.
LabeledOperator permute_registers(const LabeledOperator& op, const std::vector<std::string>& order);
LabeledVector permute_registers(const LabeledVector& v, const std::vector<std::string>& order);

// Permute to the relative order induced by canonical_register_order().
LabeledOperator to_canonical(const LabeledOperator& op);

// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
// Throws if the input is not Hermitian within tol::kHermitian.
std::pair<RVec, Mat> hermitian_eig(const LabeledOperator& m);

// Nearest PSD matrix in Frobenius norm: clip negative eigenvalues to zero.
LabeledOperator psd_project(const LabeledOperator& m);

}  // namespace dicf
