#include "dicf/operators.hpp"

#include <stdexcept>

namespace dicf {

LabeledOperator::LabeledOperator(RegisterSpace s, Mat m) : space(std::move(s)), entries(std::move(m)) {
  if (entries.rows() != space.dim() || entries.cols() != space.dim())
    throw std::invalid_argument("operator entries do not match 2^(register count)");
}

LabeledOperator LabeledOperator::zero(const RegisterSpace& s) {
  return LabeledOperator(s, Mat::Zero(s.dim(), s.dim()));
}

LabeledOperator LabeledOperator::identity(const RegisterSpace& s) {
  return LabeledOperator(s, Mat::Identity(s.dim(), s.dim()));
}

LabeledOperator LabeledOperator::scalar(Cplx value) {
  Mat m(1, 1);
  m(0, 0) = value;
  return LabeledOperator(RegisterSpace{}, std::move(m));
}

bool LabeledOperator::is_hermitian(double tol) const {
  return (entries - entries.adjoint()).norm() <= tol * std::max(1.0, entries.norm());
}

bool LabeledOperator::is_psd(double tol) const {
  if (!is_hermitian(tol)) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(entries, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

bool LabeledOperator::is_projector(double tol) const {
  return is_hermitian(tol) && (entries * entries - entries).norm() <= tol * std::max(1.0, entries.norm());
}

bool LabeledOperator::is_unitary(double tol) const {
  Mat prod = entries.adjoint() * entries;
  return (prod - Mat::Identity(dim(), dim())).norm() <= tol * std::max(1.0, std::sqrt(double(dim())));
}

LabeledVector::LabeledVector(RegisterSpace s, CVec v) : space(std::move(s)), entries(std::move(v)) {
  if (entries.size() != space.dim())
    throw std::invalid_argument("vector entries do not match 2^(register count)");
}

LabeledOperator LabeledVector::outer() const {
  return LabeledOperator(space, entries * entries.adjoint());
}

double hs_inner(const LabeledOperator& a, const LabeledOperator& b) {
  if (a.space != b.space)
    throw std::invalid_argument("hs_inner: register spaces differ");
  return (a.entries.adjoint() * b.entries).trace().real();
}

LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b) {
  RegisterSpace joined = a.space.concat(b.space);  // throws naming any clash
  const long da = a.dim(), db = b.dim();
  Mat out(da * db, da * db);
  for (long i = 0; i < da; ++i)
    for (long j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.entries(i, j) * b.entries;
  return LabeledOperator(std::move(joined), std::move(out));
}

LabeledVector kron(const LabeledVector& a, const LabeledVector& b) {
  RegisterSpace joined = a.space.concat(b.space);
  const long da = a.dim(), db = b.dim();
  CVec out(da * db);
  for (long i = 0; i < da; ++i) out.segment(i * db, db) = a.entries(i) * b.entries;
  return LabeledVector(std::move(joined), std::move(out));
}

LabeledOperator partial_trace(const LabeledOperator& op, const std::set<std::string>& drop) {
  RegisterSpace kept = op.space.without(drop);  // validates labels
  if (kept.num_registers() == op.space.num_registers()) return op;

  const int n = op.space.num_registers();
  std::vector<int> kept_pos, drop_pos;
  for (int p = 0; p < n; ++p) {
    if (drop.count(op.space.names()[p]))
      drop_pos.push_back(p);
    else
      kept_pos.push_back(p);
  }
  const long dk = kept.dim();
  const long dt = 1L << drop_pos.size();

  // Index of the full space assembled from a kept-index and a traced-index.
  auto expand = [&](long ik, long it) {
    long idx = 0;
    for (size_t q = 0; q < kept_pos.size(); ++q) {
      long bit = (ik >> (kept_pos.size() - 1 - q)) & 1;
      idx |= bit << (n - 1 - kept_pos[q]);
    }
    for (size_t q = 0; q < drop_pos.size(); ++q) {
      long bit = (it >> (drop_pos.size() - 1 - q)) & 1;
      idx |= bit << (n - 1 - drop_pos[q]);
    }
    return idx;
  };

  Mat out = Mat::Zero(dk, dk);
  for (long i = 0; i < dk; ++i)
    for (long j = 0; j < dk; ++j) {
      Cplx acc = 0.0;
      for (long t = 0; t < dt; ++t) acc += op.entries(expand(i, t), expand(j, t));
      out(i, j) = acc;
    }
  return LabeledOperator(std::move(kept), std::move(out));
}

namespace {

std::vector<long> permutation_index_map(const RegisterSpace& from, const std::vector<std::string>& order) {
  if (static_cast<int>(order.size()) != from.num_registers())
    throw std::invalid_argument("permute: order has wrong length");
  RegisterSpace target(order);
  std::vector<int> src_pos(order.size());
  for (size_t q = 0; q < order.size(); ++q) src_pos[q] = from.position(order[q]);

  const int n = from.num_registers();
  std::vector<long> map(from.dim());
  for (long i = 0; i < from.dim(); ++i) {
    long j = 0;
    for (int q = 0; q < n; ++q) {
      long bit = (i >> (n - 1 - src_pos[q])) & 1;
      j |= bit << (n - 1 - q);
    }
    map[i] = j;
  }
  return map;
}

}  // namespace

LabeledOperator permute_registers(const LabeledOperator& op, const std::vector<std::string>& order) {
  std::vector<long> map = permutation_index_map(op.space, order);
  Mat out(op.dim(), op.dim());
  for (long i = 0; i < op.dim(); ++i)
    for (long j = 0; j < op.dim(); ++j) out(map[i], map[j]) = op.entries(i, j);
  return LabeledOperator(RegisterSpace(order), std::move(out));
}

LabeledVector permute_registers(const LabeledVector& v, const std::vector<std::string>& order) {
  std::vector<long> map = permutation_index_map(v.space, order);
  CVec out(v.dim());
  for (long i = 0; i < v.dim(); ++i) out(map[i]) = v.entries(i);
  return LabeledVector(RegisterSpace(order), std::move(out));
}

LabeledOperator to_canonical(const LabeledOperator& op) {
  std::vector<std::string> order;
  for (const auto& name : canonical_register_order())
    if (op.space.contains(name)) order.push_back(name);
  // Labels outside the canonical list keep their relative order at the end.
  for (const auto& name : op.space.names())
    if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
  return permute_registers(op, order);
}

std::pair<RVec, Mat> hermitian_eig(const LabeledOperator& m) {
  if (!m.is_hermitian())
    throw std::invalid_argument("hermitian_eig: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(m.entries);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

LabeledOperator psd_project(const LabeledOperator& m) {
  auto [vals, vecs] = hermitian_eig(m);
  RVec clipped = vals.cwiseMax(0.0);
  Mat out = vecs * clipped.asDiagonal() * vecs.adjoint();
  // Symmetrize away the eigensolver's rounding.
  out = 0.5 * (out + out.adjoint().eval());
  return LabeledOperator(m.space, std::move(out));
}

}  // namespace dicf
