#pragma once

#include "pptmc/operators.hpp"

#include <vector>

namespace pptmc {

// Internal standard-form conic program over real symmetric PSD blocks and a
// nonnegative orthant:
//     min <c,x>   s.t.   A x = b,   x in K,
// with coordinates the concatenation of rsvec(X_blk) for PSD blocks followed
// by plain entries for Nonneg blocks. The dual is
//     max <b,y>   s.t.   A'y + s = c,   s in K.

struct ConeBlock {
  enum Kind { Psd, Nonneg } kind;
  int size;  // matrix side for Psd, vector length for Nonneg
};

struct SparseTerm {
  int col;
  double val;
};

struct ConeRow {
  std::vector<SparseTerm> terms;  // global coordinates
};

enum class ConeStatus {
  Optimal,
  PrimalInfeasible,
  DualInfeasible,
  IterationLimit,
  NumericalFailure,
};

const char* to_string(ConeStatus s);

struct ConeOptions {
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  double tol_cone = 1e-9;
  int max_iter = 200;
  double step_frac = 0.98;  // fraction of the distance to the cone boundary
  int verbose = 0;
};

struct ConeSolution {
  ConeStatus status = ConeStatus::NumericalFailure;
  VectorXd x, y, s;
  double pobj = 0.0, dobj = 0.0;
  double rel_gap = 0.0, p_res = 0.0, d_res = 0.0;
  int iterations = 0;
  // Improving ray when infeasible: PrimalInfeasible carries y with b'y = 1
  // and -A'y in K; DualInfeasible carries x in K with Ax ~ 0, <c,x> = -1.
  VectorXd cert;
  double cert_quality = 1e30;
};

struct ConeProgram {
  std::vector<ConeBlock> blocks;
  std::vector<ConeRow> rows;
  VectorXd b, c;

  int total_dim() const;
  std::vector<int> block_offsets() const;
};

ConeSolution solve_cone(const ConeProgram& p, const ConeOptions& opt = {});

}  // namespace pptmc
