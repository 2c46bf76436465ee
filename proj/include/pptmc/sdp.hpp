#pragma once

#include "pptmc/ipm.hpp"
#include "pptmc/svec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pptmc {

enum class Direction { Minimize, Maximize };
enum class Cone { Psd, NonnegDiag };
enum class Sense { Le, Eq };

enum class SdpStatus { Optimal, PrimalInfeasible, DualInfeasible, NumericalFailure };
const char* to_string(SdpStatus s);

struct SdpBlock {
  std::string name;
  int side = 0;
  Cone cone = Cone::Psd;
};

struct SdpTerm {
  int block = 0;
  LinMap map;  // from the block's operator space into the constraint space
};

// One affine constraint  sum_i map_i(X_i)  (<= or ==)  bound.
struct SdpConstraint {
  std::string name;
  int space_side = 1;
  Sense sense = Sense::Le;
  MatrixXcd bound;
  std::vector<SdpTerm> terms;
};

// Operator-form semidefinite program. direction applies to
// sum_i Tr[objective_i X_i] over the variable blocks.
struct SdpProblem {
  Direction direction = Direction::Minimize;
  std::vector<SdpBlock> blocks;
  std::vector<MatrixXcd> objective;
  std::vector<SdpConstraint> constraints;

  int add_block(const std::string& name, int side, Cone cone);
  int block_index(const std::string& name) const;
  void set_objective(int block, const MatrixXcd& k);
  void add_constraint(SdpConstraint con);
  void validate() const;
};

struct SdpOptions {
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  double tol_cone = 1e-9;
  int max_iter = 200;
  int verbose = 0;
  int max_rows = 20000;
  int max_block_side = 160;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  std::vector<MatrixXcd> block_values;  // primal optimizers, aligned with blocks
  std::vector<MatrixXcd> duals;         // one per constraint; PSD for Le rows
  double primal_value = 0.0, dual_value = 0.0;
  double gap = 0.0, p_res = 0.0, d_res = 0.0;
  int iterations = 0;
  // Improving rays for infeasible statuses, in the same shapes as duals /
  // block_values respectively.
  std::vector<MatrixXcd> cert_duals;
  std::vector<MatrixXcd> cert_blocks;
  double cert_quality = 1e30;

  const MatrixXcd& block(const SdpProblem& p, const std::string& name) const;
};

SdpSolution solve(const SdpProblem& p, const SdpOptions& opt = {});

// Explicit conic dual with the same representation; equality rows dualize to
// differences of PSD blocks so the result stays inside the cone vocabulary.
SdpProblem dualize(const SdpProblem& p);

enum class SlaterVerdict { StrictlyFeasible, BoundaryOnly, Unknown };

struct SlaterReport {
  SlaterVerdict verdict = SlaterVerdict::Unknown;
  double margin = 0.0;
  std::vector<MatrixXcd> witness;
};

// Max-margin feasibility probe: maximize t subject to every inequality having
// slack t and every cone variable dominating t*I.
SlaterReport slater_check(const SdpProblem& p, const SdpOptions& opt = {});

}  // namespace pptmc
