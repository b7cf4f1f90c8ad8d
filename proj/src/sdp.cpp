#include "dicf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace dicf::sdp {

// ---------------------------------------------------------------------------
// LinearMap

LinearMap LinearMap::identity(RegisterSpace space) {
  LinearMap m;
  m.input_ = space;
  m.output_ = std::move(space);
  return m;
}

LinearMap& LinearMap::tensor_identity(const RegisterSpace& extra) {
  Step s;
  s.kind = Step::Kind::tensor_identity;
  s.in = output_;
  s.added = extra;
  s.out = output_.concat(extra);
  output_ = s.out;
  steps_.push_back(std::move(s));
  return *this;
}

LinearMap& LinearMap::trace_out(const std::set<std::string>& drop) {
  Step s;
  s.kind = Step::Kind::partial_trace;
  s.in = output_;
  s.dropped = drop;
  s.out = output_.without(drop);
  output_ = s.out;
  steps_.push_back(std::move(s));
  return *this;
}

LinearMap& LinearMap::scale(double factor) {
  Step s;
  s.kind = Step::Kind::scale;
  s.in = output_;
  s.out = output_;
  s.factor = factor;
  steps_.push_back(std::move(s));
  return *this;
}

LinearMap& LinearMap::permute(const std::vector<std::string>& order) {
  Step s;
  s.kind = Step::Kind::permute;
  s.in = output_;
  s.order = order;
  s.out = RegisterSpace(order);
  if (s.out.num_registers() != s.in.num_registers())
    throw std::invalid_argument("permute: order length mismatch");
  for (const auto& n : order)
    if (!s.in.contains(n)) throw std::invalid_argument("permute: unknown label '" + n + "'");
  output_ = s.out;
  steps_.push_back(std::move(s));
  return *this;
}

LinearMap& LinearMap::trace_against(const LabeledOperator& m) {
  if (m.space != output_)
    throw std::invalid_argument("trace_against: operator space mismatch");
  if (!m.is_hermitian())
    throw std::invalid_argument("trace_against: operator must be Hermitian");
  Step s;
  s.kind = Step::Kind::trace_against;
  s.in = output_;
  s.out = RegisterSpace{};
  s.against = m;
  output_ = s.out;
  steps_.push_back(std::move(s));
  return *this;
}

LabeledOperator LinearMap::apply(const LabeledOperator& x) const {
  if (x.space != input_)
    throw std::invalid_argument("LinearMap::apply: input space mismatch");
  LabeledOperator cur = x;
  for (const auto& s : steps_) {
    switch (s.kind) {
      case Step::Kind::tensor_identity:
        cur = kron(cur, LabeledOperator::identity(s.added));
        break;
      case Step::Kind::partial_trace:
        cur = partial_trace(cur, s.dropped);
        break;
      case Step::Kind::scale:
        cur.entries *= s.factor;
        break;
      case Step::Kind::permute:
        cur = permute_registers(cur, s.order);
        break;
      case Step::Kind::trace_against:
        cur = LabeledOperator::scalar((s.against.entries.adjoint() * cur.entries).trace());
        break;
    }
  }
  return cur;
}

LabeledOperator LinearMap::adjoint_apply(const LabeledOperator& y) const {
  if (y.space != output_)
    throw std::invalid_argument("LinearMap::adjoint_apply: output space mismatch");
  LabeledOperator cur = y;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    const Step& s = *it;
    switch (s.kind) {
      case Step::Kind::tensor_identity:
        cur = partial_trace(cur, std::set<std::string>(s.added.names().begin(), s.added.names().end()));
        break;
      case Step::Kind::partial_trace:
        cur = permute_registers(
            kron(cur, LabeledOperator::identity(
                          RegisterSpace{[&] {
                            std::vector<std::string> dropped_in_order;
                            for (const auto& n : s.in.names())
                              if (s.dropped.count(n)) dropped_in_order.push_back(n);
                            return dropped_in_order;
                          }()})),
            s.in.names());
        break;
      case Step::Kind::scale:
        cur.entries *= s.factor;
        break;
      case Step::Kind::permute:
        cur = permute_registers(cur, s.in.names());
        break;
      case Step::Kind::trace_against: {
        double w = cur.entries(0, 0).real();
        cur = s.against;
        cur.entries *= w;
        break;
      }
    }
  }
  return cur;
}

nlohmann::ordered_json LinearMap::to_json() const {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& s : steps_) {
    nlohmann::ordered_json j;
    switch (s.kind) {
      case Step::Kind::tensor_identity:
        j["kind"] = "tensor_identity";
        j["registers"] = s.added.names();
        break;
      case Step::Kind::partial_trace:
        j["kind"] = "partial_trace";
        j["registers"] = std::vector<std::string>(s.dropped.begin(), s.dropped.end());
        break;
      case Step::Kind::scale:
        j["kind"] = "scale";
        j["factor"] = s.factor;
        break;
      case Step::Kind::permute:
        j["kind"] = "permute";
        j["order"] = s.order;
        break;
      case Step::Kind::trace_against:
        j["kind"] = "trace_against";
        j["registers"] = s.against.space.names();
        break;
    }
    steps.push_back(std::move(j));
  }
  return steps;
}

// ---------------------------------------------------------------------------
// Hermitian vectorization: an isometry between Herm(d) with the
// Hilbert-Schmidt inner product and R^{d^2}.

namespace {

long herm_dim(long d) { return d * d; }

void herm_vec(const Mat& x, double* out) {
  const long d = x.rows();
  long k = 0;
  const double s = std::sqrt(2.0);
  for (long i = 0; i < d; ++i) {
    out[k++] = x(i, i).real();
    for (long j = i + 1; j < d; ++j) {
      out[k++] = s * x(i, j).real();
      out[k++] = s * x(i, j).imag();
    }
  }
}

void herm_unvec(const double* in, Mat& x) {
  const long d = x.rows();
  long k = 0;
  const double s = 1.0 / std::sqrt(2.0);
  for (long i = 0; i < d; ++i) {
    x(i, i) = in[k++];
    for (long j = i + 1; j < d; ++j) {
      double re = s * in[k++];
      double im = s * in[k++];
      x(i, j) = Cplx(re, im);
      x(j, i) = Cplx(re, -im);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Solver workspace

struct SdpSolver::Impl {
  SdpProblem problem;

  long num_vars = 0;  // stacked real dimension over blocks
  std::vector<long> block_offset, block_dim;

  long num_rows = 0;  // stacked constraint rows (before pruning)
  std::vector<long> cons_offset, cons_dim;

  std::vector<long> kept_rows;     // rows surviving zero-row pruning
  Eigen::VectorXd row_scale;       // per kept row
  Eigen::VectorXd b_scaled;        // kept rows
  Eigen::MatrixXd gram;            // kept x kept
  Eigen::MatrixXd gram_pinv;       // pseudoinverse, robust to redundant rows
  Eigen::VectorXd objective_vec;   // stacked cost

  void build();
  void rebuild_rhs();
  Eigen::VectorXd pack(const std::vector<LabeledOperator>& mats) const;
  std::vector<LabeledOperator> unpack(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_constraints(const Eigen::VectorXd& v) const;        // scaled rows
  Eigen::VectorXd apply_constraints_adjoint(const Eigen::VectorXd& y) const;
  void project_affine(Eigen::VectorXd& v) const;
  void project_psd(Eigen::VectorXd& v, double* min_eig = nullptr) const;
  std::pair<double, double> residuals_struct(const std::vector<LabeledOperator>& point) const;
};

namespace {

void validate_structure(const SdpProblem& p) {
  if (p.blocks.empty()) throw std::invalid_argument("SDP must have at least one variable block");
  std::set<std::string> names;
  for (const auto& blk : p.blocks)
    if (!names.insert(blk.name).second)
      throw std::invalid_argument("duplicate block name '" + blk.name + "'");
  if (p.objective.size() != p.blocks.size())
    throw std::invalid_argument("objective must have one cost matrix per block");
  for (size_t i = 0; i < p.blocks.size(); ++i) {
    if (p.objective[i].space != p.blocks[i].space)
      throw std::invalid_argument("objective space mismatch on block '" + p.blocks[i].name + "'");
    if (!p.objective[i].is_hermitian())
      throw std::invalid_argument("objective matrix must be Hermitian");
  }
  for (const auto& cons : p.constraints) {
    if (cons.terms.empty()) throw std::invalid_argument("constraint has no terms");
    if (!cons.rhs.is_hermitian())
      throw std::invalid_argument("constraint right-hand side must be Hermitian");
    for (const auto& term : cons.terms) {
      if (term.block < 0 || term.block >= static_cast<int>(p.blocks.size()))
        throw std::invalid_argument("constraint references unknown block");
      if (term.map.input() != p.blocks[term.block].space)
        throw std::invalid_argument("constraint map input space does not match its block");
      if (term.map.output() != cons.rhs.space)
        throw std::invalid_argument("constraint map output space does not match the rhs");
    }
  }
}

}  // namespace

Eigen::VectorXd SdpSolver::Impl::pack(const std::vector<LabeledOperator>& mats) const {
  Eigen::VectorXd v(num_vars);
  for (size_t i = 0; i < problem.blocks.size(); ++i)
    herm_vec(mats[i].entries, v.data() + block_offset[i]);
  return v;
}

std::vector<LabeledOperator> SdpSolver::Impl::unpack(const Eigen::VectorXd& v) const {
  std::vector<LabeledOperator> mats;
  mats.reserve(problem.blocks.size());
  for (size_t i = 0; i < problem.blocks.size(); ++i) {
    Mat m(block_dim[i], block_dim[i]);
    herm_unvec(v.data() + block_offset[i], m);
    mats.emplace_back(problem.blocks[i].space, std::move(m));
  }
  return mats;
}

Eigen::VectorXd SdpSolver::Impl::apply_constraints(const Eigen::VectorXd& v) const {
  std::vector<LabeledOperator> mats = unpack(v);
  Eigen::VectorXd full(num_rows);
  for (size_t j = 0; j < problem.constraints.size(); ++j) {
    const auto& cons = problem.constraints[j];
    LabeledOperator acc = LabeledOperator::zero(cons.rhs.space);
    for (const auto& term : cons.terms) acc.entries += term.map.apply(mats[term.block]).entries;
    herm_vec(acc.entries, full.data() + cons_offset[j]);
  }
  Eigen::VectorXd out(kept_rows.size());
  for (size_t r = 0; r < kept_rows.size(); ++r) out(r) = full(kept_rows[r]) * row_scale(r);
  return out;
}

Eigen::VectorXd SdpSolver::Impl::apply_constraints_adjoint(const Eigen::VectorXd& y) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(num_rows);
  for (size_t r = 0; r < kept_rows.size(); ++r) full(kept_rows[r]) = y(r) * row_scale(r);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_vars);
  for (size_t j = 0; j < problem.constraints.size(); ++j) {
    const auto& cons = problem.constraints[j];
    Mat dual(cons.rhs.dim(), cons.rhs.dim());
    herm_unvec(full.data() + cons_offset[j], dual);
    LabeledOperator dual_op(cons.rhs.space, std::move(dual));
    for (const auto& term : cons.terms) {
      LabeledOperator back = term.map.adjoint_apply(dual_op);
      Eigen::VectorXd chunk(herm_dim(block_dim[term.block]));
      herm_vec(back.entries, chunk.data());
      out.segment(block_offset[term.block], chunk.size()) += chunk;
    }
  }
  return out;
}

void SdpSolver::Impl::build() {
  validate_structure(problem);

  block_offset.clear();
  block_dim.clear();
  num_vars = 0;
  for (const auto& blk : problem.blocks) {
    block_offset.push_back(num_vars);
    block_dim.push_back(blk.space.dim());
    num_vars += herm_dim(blk.space.dim());
  }

  cons_offset.clear();
  cons_dim.clear();
  num_rows = 0;
  for (const auto& cons : problem.constraints) {
    cons_offset.push_back(num_rows);
    cons_dim.push_back(herm_dim(cons.rhs.dim()));
    num_rows += herm_dim(cons.rhs.dim());
  }

  // Dense adjoint columns, used once to compute row norms and the Gram matrix.
  Eigen::MatrixXd at(num_vars, num_rows);
  for (size_t j = 0; j < problem.constraints.size(); ++j) {
    const auto& cons = problem.constraints[j];
    const long dj = cons.rhs.dim();
    for (long r = 0; r < herm_dim(dj); ++r) {
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(herm_dim(dj));
      unit(r) = 1.0;
      Mat dual(dj, dj);
      herm_unvec(unit.data(), dual);
      LabeledOperator dual_op(cons.rhs.space, std::move(dual));
      Eigen::VectorXd col = Eigen::VectorXd::Zero(num_vars);
      for (const auto& term : cons.terms) {
        LabeledOperator back = term.map.adjoint_apply(dual_op);
        Eigen::VectorXd chunk(herm_dim(block_dim[term.block]));
        herm_vec(back.entries, chunk.data());
        col.segment(block_offset[term.block], chunk.size()) += chunk;
      }
      at.col(cons_offset[j] + r) = col;
    }
  }

  // Prune identically-zero rows and scale the rest to unit norm.
  Eigen::VectorXd full_b(num_rows);
  for (size_t j = 0; j < problem.constraints.size(); ++j)
    herm_vec(problem.constraints[j].rhs.entries, full_b.data() + cons_offset[j]);

  kept_rows.clear();
  std::vector<double> scales;
  for (long r = 0; r < num_rows; ++r) {
    double norm = at.col(r).norm();
    if (norm < 1e-14) {
      if (std::abs(full_b(r)) > 1e-12)
        throw std::invalid_argument("constraint row is identically zero but its rhs is not");
      continue;
    }
    kept_rows.push_back(r);
    scales.push_back(1.0 / norm);
  }
  row_scale = Eigen::Map<Eigen::VectorXd>(scales.data(), scales.size());

  Eigen::MatrixXd at_kept(num_vars, kept_rows.size());
  for (size_t r = 0; r < kept_rows.size(); ++r)
    at_kept.col(r) = at.col(kept_rows[r]) * row_scale(r);
  at.resize(0, 0);

  gram = at_kept.transpose() * at_kept;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
  gram_pinv = cod.pseudoInverse();
  at_kept.resize(0, 0);

  rebuild_rhs();

  objective_vec = pack(problem.objective);

  // The feasible region must be bounded, which for matrix blocks means the
  // constraints fix the trace (directly or by implication): the per-block
  // trace functional has to lie in the row space. Scalar slack blocks are
  // exempt when some constraint ties them to the matrix blocks, which bounds
  // them through the cone instead.
  for (size_t i = 0; i < problem.blocks.size(); ++i) {
    if (problem.blocks[i].space.dim() == 1) {
      bool tied = false;
      for (const auto& cons : problem.constraints)
        for (const auto& term : cons.terms)
          if (term.block == static_cast<int>(i)) tied = true;
      if (!tied)
        throw std::invalid_argument("slack block '" + problem.blocks[i].name +
                                    "' appears in no constraint and is unbounded");
      continue;
    }
    std::vector<LabeledOperator> ident;
    for (size_t k = 0; k < problem.blocks.size(); ++k)
      ident.push_back(k == i ? LabeledOperator::identity(problem.blocks[k].space)
                             : LabeledOperator::zero(problem.blocks[k].space));
    Eigen::VectorXd t = pack(ident);
    Eigen::VectorXd u = gram_pinv * apply_constraints(t);
    if ((apply_constraints_adjoint(u) - t).norm() > 1e-8 * t.norm())
      throw std::invalid_argument("constraints do not fix the trace of block '" +
                                  problem.blocks[i].name + "'");
  }
}

void SdpSolver::Impl::rebuild_rhs() {
  Eigen::VectorXd full_b(num_rows);
  for (size_t j = 0; j < problem.constraints.size(); ++j) {
    const auto& cons = problem.constraints[j];
    if (cons.rhs.dim() != static_cast<long>(std::lround(std::sqrt(double(cons_dim[j])))))
      throw std::invalid_argument("constraint rhs dimension changed");
    herm_vec(cons.rhs.entries, full_b.data() + cons_offset[j]);
  }
  b_scaled.resize(kept_rows.size());
  for (size_t r = 0; r < kept_rows.size(); ++r) b_scaled(r) = full_b(kept_rows[r]) * row_scale(r);
}

void SdpSolver::Impl::project_affine(Eigen::VectorXd& v) const {
  Eigen::VectorXd r = apply_constraints(v) - b_scaled;
  Eigen::VectorXd u = gram_pinv * r;
  // One refinement pass: the normal equations square the conditioning of the
  // constraint matrix, which otherwise caps the attainable residual.
  u += gram_pinv * (r - gram * u);
  v -= apply_constraints_adjoint(u);
}

void SdpSolver::Impl::project_psd(Eigen::VectorXd& v, double* min_eig) const {
  double worst = 0.0;
  for (size_t i = 0; i < problem.blocks.size(); ++i) {
    const long d = block_dim[i];
    if (d == 1) {
      double x = v(block_offset[i]);
      worst = std::min(worst, x);
      v(block_offset[i]) = std::max(0.0, x);
      continue;
    }
    Mat m(d, d);
    herm_unvec(v.data() + block_offset[i], m);
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    worst = std::min(worst, es.eigenvalues().minCoeff());
    Mat proj = es.eigenvectors() *
               es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().adjoint();
    proj = 0.5 * (proj + proj.adjoint().eval());
    herm_vec(proj, v.data() + block_offset[i]);
  }
  if (min_eig) *min_eig = worst;
}

std::pair<double, double> SdpSolver::Impl::residuals_struct(
    const std::vector<LabeledOperator>& point) const {
  double num = 0.0, den = 0.0;
  for (const auto& cons : problem.constraints) {
    LabeledOperator acc = LabeledOperator::zero(cons.rhs.space);
    for (const auto& term : cons.terms) acc.entries += term.map.apply(point[term.block]).entries;
    num += (acc.entries - cons.rhs.entries).squaredNorm();
    den += cons.rhs.entries.squaredNorm();
  }
  double rel = std::sqrt(num) / std::max(1.0, std::sqrt(den));
  double min_eig = 0.0;
  for (const auto& blk : point) {
    Eigen::SelfAdjointEigenSolver<Mat> es(blk.entries, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  return {rel, min_eig};
}

SdpSolver::SdpSolver(SdpProblem problem) : impl_(std::make_unique<Impl>()) {
  impl_->problem = std::move(problem);
  impl_->build();
}

SdpSolver::~SdpSolver() = default;
SdpSolver::SdpSolver(SdpSolver&&) noexcept = default;
SdpSolver& SdpSolver::operator=(SdpSolver&&) noexcept = default;

const SdpProblem& SdpSolver::problem() const { return impl_->problem; }

void SdpSolver::set_objective(std::vector<LabeledOperator> objective) {
  if (objective.size() != impl_->problem.blocks.size())
    throw std::invalid_argument("objective must have one cost matrix per block");
  for (size_t i = 0; i < objective.size(); ++i) {
    if (objective[i].space != impl_->problem.blocks[i].space || !objective[i].is_hermitian())
      throw std::invalid_argument("objective matrix mismatch");
  }
  impl_->problem.objective = std::move(objective);
  impl_->objective_vec = impl_->pack(impl_->problem.objective);
}

void SdpSolver::set_constraint_rhs(int constraint_index, LabeledOperator rhs) {
  auto& cons = impl_->problem.constraints.at(constraint_index);
  if (rhs.space != cons.rhs.space || !rhs.is_hermitian())
    throw std::invalid_argument("constraint rhs mismatch");
  cons.rhs = std::move(rhs);
  impl_->rebuild_rhs();
}

SdpSolution SdpSolver::solve(const SolveOptions& opts, Eigen::VectorXd* warm) const {
  const Impl& w = *impl_;
  const long n = w.num_vars;
  const double step = opts.step_scale / std::max(1.0, w.objective_vec.norm());
  const double rho = opts.over_relaxation;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  if (warm && warm->size() == n) z = *warm;

  Eigen::VectorXd x(n), y(n), best_y;
  double best_resid = std::numeric_limits<double>::infinity();
  double best_resid_obj = 0.0;
  long best_resid_iter = 0;

  // One splitting step from z: x = affine prox, y = cone projection.
  auto splitting_step = [&](const Eigen::VectorXd& z_in) {
    x = z_in + step * w.objective_vec;
    w.project_affine(x);
    y = 2.0 * x - z_in;
    w.project_psd(y);
    return (z_in + rho * (y - x)).eval();
  };

  // Anderson window over the fixed-point sequence.
  const int mem = std::max(0, opts.acceleration_memory);
  Eigen::MatrixXd dz(n, std::max(1, mem)), dg(n, std::max(1, mem));
  int filled = 0;
  Eigen::VectorXd prev_z, prev_g;
  double best_g = std::numeric_limits<double>::infinity();

  std::deque<std::pair<long, double>> obj_window;
  SdpSolution out;
  bool stopped = false;

  long it = 0;
  for (it = 1; it <= opts.max_iter; ++it) {
    Eigen::VectorXd z_plain = splitting_step(z);
    Eigen::VectorXd g = z_plain - z;
    const double gnorm = g.norm();

    if (!std::isfinite(gnorm) || (best_g < 1e-14 ? false : gnorm > 1e4 * best_g)) {
      // Runaway extrapolation: drop the window and take the plain step.
      filled = 0;
      prev_z.resize(0);
      z = std::move(z_plain);
    } else {
      best_g = std::min(best_g, gnorm);
      if (mem > 0 && prev_z.size() == n) {
        int col = filled < mem ? filled : mem - 1;
        if (filled >= mem) {
          // Shift the window left.
          dz.leftCols(mem - 1) = dz.rightCols(mem - 1).eval();
          dg.leftCols(mem - 1) = dg.rightCols(mem - 1).eval();
        }
        dz.col(col) = z - prev_z;
        dg.col(col) = g - prev_g;
        filled = std::min(filled + 1, mem);
      }
      prev_z = z;
      prev_g = g;
      if (filled > 0) {
        Eigen::MatrixXd window = dg.leftCols(filled);
        Eigen::VectorXd gamma =
            window.colPivHouseholderQr().solve(g);
        Eigen::VectorXd z_acc =
            z + g - (dz.leftCols(filled) + dg.leftCols(filled)) * gamma;
        z = gamma.allFinite() ? std::move(z_acc) : std::move(z_plain);
      } else {
        z = std::move(z_plain);
      }
    }

    if (it % opts.check_every != 0 && it != opts.max_iter) continue;

    // y is PSD by construction; its equality residual and objective decide
    // convergence.
    double resid = (w.apply_constraints(y) - w.b_scaled).norm() / std::max(1.0, w.b_scaled.norm());
    double obj = w.objective_vec.dot(y);
    if (resid < best_resid) {
      // Only a clear improvement postpones the plateau stop.
      if (resid < 0.99 * best_resid) best_resid_iter = it;
      best_resid = resid;
      best_y = y;
      best_resid_obj = obj;
    }

    obj_window.emplace_back(it, obj);
    while (!obj_window.empty() && obj_window.front().first < it - opts.stall_window)
      obj_window.pop_front();
    double band = 0.0;
    if (obj_window.size() >= 2) {
      double lo = obj_window.front().second, hi = lo;
      for (const auto& [_, v] : obj_window) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      band = hi - lo;
    }

    bool window_covered =
        obj_window.size() >= 2 && obj_window.back().first - obj_window.front().first >= opts.stall_window - opts.check_every;
    if (resid <= opts.tol && window_covered && band <= opts.tol * std::max(1.0, std::abs(obj))) {
      out.converged = true;
      out.objective_band = band;
      stopped = true;
      break;
    }

    // Divergence: the splitting state blowing up, or a long stretch with no
    // residual progress well above tolerance, signals an empty feasible set.
    if (z.norm() > 1e9 * std::max(1.0, w.b_scaled.norm())) {
      out.infeasible = true;
      stopped = true;
      break;
    }
    if (it - best_resid_iter > std::max<long>(20000, opts.max_iter / 5)) {
      if (best_resid > std::max(1e-4, 50 * opts.tol)) {
        out.infeasible = true;
      }
      // Otherwise the iteration has plateaued near (but above) tolerance;
      // returning the best iterate beats burning the rest of the budget.
      stopped = true;
      break;
    }
  }
  (void)stopped;

  if (warm) *warm = z;

  const Eigen::VectorXd& final_y = out.converged || best_y.size() == 0 ? y : best_y;
  out.blocks = w.unpack(final_y);
  auto [rel, min_eig] = w.residuals_struct(out.blocks);
  out.equality_residual = rel;
  out.psd_violation = min_eig;
  out.objective = w.objective_vec.dot(final_y);
  out.iterations = std::min(it, opts.max_iter);
  if (!out.converged && out.objective_band == 0.0 && !obj_window.empty()) {
    double lo = obj_window.front().second, hi = lo;
    for (const auto& [_, v] : obj_window) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out.objective_band = hi - lo;
  }
  (void)best_resid_obj;
  return out;
}

double SdpSolver::objective_at(const std::vector<LabeledOperator>& point) const {
  return sdp::objective_at(impl_->problem, point);
}

std::pair<double, double> SdpSolver::residuals_at(const std::vector<LabeledOperator>& point) const {
  return impl_->residuals_struct(point);
}

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts) {
  SdpSolver solver(p);
  return solver.solve(opts);
}

void validate(const SdpProblem& p) {
  SdpSolver solver(p);  // construction runs all checks
}

double objective_at(const SdpProblem& p, const std::vector<LabeledOperator>& point) {
  if (point.size() != p.blocks.size())
    throw std::invalid_argument("objective_at: point has wrong number of blocks");
  Cplx total = 0.0;
  for (size_t i = 0; i < p.blocks.size(); ++i) {
    if (point[i].space != p.blocks[i].space)
      throw std::invalid_argument("objective_at: block space mismatch");
    total += (p.objective[i].entries.adjoint() * point[i].entries).trace();
  }
  if (std::abs(total.imag()) > 1e-10)
    throw std::runtime_error("objective_at: imaginary residue exceeds 1e-10");
  return total.real();
}

std::pair<double, double> residuals(const SdpProblem& p, const std::vector<LabeledOperator>& point) {
  if (point.size() != p.blocks.size())
    throw std::invalid_argument("residuals: point has wrong number of blocks");
  double num = 0.0, den = 0.0;
  for (const auto& cons : p.constraints) {
    LabeledOperator acc = LabeledOperator::zero(cons.rhs.space);
    for (const auto& term : cons.terms) acc.entries += term.map.apply(point[term.block]).entries;
    num += (acc.entries - cons.rhs.entries).squaredNorm();
    den += cons.rhs.entries.squaredNorm();
  }
  double min_eig = 0.0;
  for (const auto& blk : point) {
    Eigen::SelfAdjointEigenSolver<Mat> es(blk.entries, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  return {std::sqrt(num) / std::max(1.0, std::sqrt(den)), min_eig};
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::ordered_json matrix_to_json(const Mat& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (long i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (long j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::ordered_json problem_to_json(const SdpProblem& p) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["sense"] = "maximize";
  j["blocks"] = nlohmann::ordered_json::array();
  for (const auto& blk : p.blocks)
    j["blocks"].push_back({{"name", blk.name}, {"registers", blk.space.names()}});
  j["constraints"] = nlohmann::ordered_json::array();
  for (const auto& cons : p.constraints) {
    nlohmann::ordered_json cj;
    cj["terms"] = nlohmann::ordered_json::array();
    for (const auto& term : cons.terms)
      cj["terms"].push_back({{"block", p.blocks[term.block].name}, {"map", term.map.to_json()}});
    cj["rhs"] = {{"registers", cons.rhs.space.names()}, {"matrix", matrix_to_json(cons.rhs.entries)}};
    j["constraints"].push_back(std::move(cj));
  }
  j["objective"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < p.blocks.size(); ++i)
    j["objective"].push_back(
        {{"block", p.blocks[i].name}, {"matrix", matrix_to_json(p.objective[i].entries)}});
  return j;
}

nlohmann::ordered_json solution_to_json(const SdpSolution& s) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["objective"] = s.objective;
  j["equality_residual"] = s.equality_residual;
  j["psd_violation"] = s.psd_violation;
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["infeasible"] = s.infeasible;
  j["objective_band"] = s.objective_band;
  j["blocks"] = nlohmann::ordered_json::array();
  for (const auto& blk : s.blocks)
    j["blocks"].push_back({{"registers", blk.space.names()}, {"matrix", matrix_to_json(blk.entries)}});
  return j;
}

}  // namespace dicf::sdp
