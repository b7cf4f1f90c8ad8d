#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicf/operators.hpp"

namespace dicf::sdp {

// A real-linear map between Hermitian operator spaces, stored as a chain of
// primitive steps: tensor-with-identity, partial trace, real scaling,
// register permutation, and trace against a fixed Hermitian matrix (a scalar
// functional). Sums of maps are expressed as multiple constraint terms.
// The adjoint of every primitive is available, so the whole chain is
// adjointable; tests pin <L(X),Y> == <X,L*(Y)> on random inputs.
class LinearMap {
 public:
  static LinearMap identity(RegisterSpace space);

  LinearMap& tensor_identity(const RegisterSpace& extra);       // X -> X (x) I
  LinearMap& trace_out(const std::set<std::string>& drop);      // partial trace
  LinearMap& scale(double factor);
  LinearMap& permute(const std::vector<std::string>& order);
  LinearMap& trace_against(const LabeledOperator& m);           // X -> tr(M X) as 1x1

  const RegisterSpace& input() const { return input_; }
  const RegisterSpace& output() const { return output_; }

  LabeledOperator apply(const LabeledOperator& x) const;
  LabeledOperator adjoint_apply(const LabeledOperator& y) const;

  nlohmann::ordered_json to_json() const;

 private:
  struct Step {
    enum class Kind { tensor_identity, partial_trace, scale, permute, trace_against };
    Kind kind;
    RegisterSpace in, out;
    RegisterSpace added;                // tensor_identity
    std::set<std::string> dropped;      // partial_trace
    double factor = 1.0;                // scale
    std::vector<std::string> order;     // permute
    LabeledOperator against;            // trace_against
  };
  RegisterSpace input_, output_;
  std::vector<Step> steps_;
};

struct ConstraintTerm {
  int block;       // index into SdpProblem::blocks
  LinearMap map;   // input space must equal the block's space
};

// sum_t map_t(X_{block_t}) == rhs
struct Constraint {
  std::vector<ConstraintTerm> terms;
  LabeledOperator rhs;
};

struct Block {
  std::string name;
  RegisterSpace space;
};

// maximize sum_i <C_i, X_i>  s.t.  constraints hold and every X_i is PSD.
struct SdpProblem {
  std::vector<Block> blocks;
  std::vector<Constraint> constraints;
  std::vector<LabeledOperator> objective;  // one Hermitian cost per block
};

struct SolveOptions {
  double tol = 1e-7;             // relative equality residual and objective stall
  long max_iter = 200000;
  double over_relaxation = 1.5;  // splitting relaxation in (0, 2)
  double step_scale = 1.0;       // multiplies the automatic prox step
  long stall_window = 100;       // iterations over which the objective must settle
  long check_every = 25;         // diagnostics cadence
  // Anderson acceleration window on the splitting fixed-point sequence;
  // 0 falls back to the plain iteration.
  int acceleration_memory = 10;
};

struct SdpSolution {
  std::vector<LabeledOperator> blocks;
  double objective = 0.0;
  double equality_residual = 0.0;  // relative Frobenius, recomputed structurally
  double psd_violation = 0.0;      // most negative eigenvalue across blocks
  long iterations = 0;
  bool converged = false;
  bool infeasible = false;
  double objective_band = 0.0;     // objective oscillation over the stall window
};

// Prepared workspace: validates the problem, stacks and row-scales the
// constraint system, and factorizes its Gram matrix once. The factorization
// is reused across solves, objective changes (weight sweeps) and rhs changes
// (frontier targets).
class SdpSolver {
 public:
  explicit SdpSolver(SdpProblem problem);
  ~SdpSolver();
  SdpSolver(SdpSolver&&) noexcept;
  SdpSolver& operator=(SdpSolver&&) noexcept;

  const SdpProblem& problem() const;

  void set_objective(std::vector<LabeledOperator> objective);
  void set_constraint_rhs(int constraint_index, LabeledOperator rhs);

  // warm, when given, carries the splitting state in and out.
  SdpSolution solve(const SolveOptions& opts = {}, Eigen::VectorXd* warm = nullptr) const;

  double objective_at(const std::vector<LabeledOperator>& point) const;
  std::pair<double, double> residuals_at(const std::vector<LabeledOperator>& point) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot entry points mirroring the workspace methods.
SdpSolution solve(const SdpProblem& p, const SolveOptions& opts = {});
void validate(const SdpProblem& p);
double objective_at(const SdpProblem& p, const std::vector<LabeledOperator>& point);
// {relative equality residual, most negative eigenvalue}
std::pair<double, double> residuals(const SdpProblem& p, const std::vector<LabeledOperator>& point);

nlohmann::ordered_json problem_to_json(const SdpProblem& p);
nlohmann::ordered_json solution_to_json(const SdpSolution& s);

}  // namespace dicf::sdp
