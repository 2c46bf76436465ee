#include "pptmc/sdp.hpp"

#include "pptmc/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace pptmc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Coordinates at or past this index parametrize imaginary parts.
bool is_im_coord(int u, int n) { return u >= n + n * (n - 1) / 2; }

bool is_real_mat(const MatrixXcd& m) {
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return m.imag().cwiseAbs().maxCoeff() <= 1e-13 * scale;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("sdp: " + msg);
}

MatrixXcd hermitize(const MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

// Isometric embedding of one csvec coordinate of a side-n complex space into
// the rsvec coordinates of the side-2n real space hosting [[Re,-Im],[Im,Re]].
// Every column has exactly two entries and columns are mutually orthogonal,
// so the adjoint of the embedding doubles as the extraction map.
struct TeEntry {
  int coord;
  double val;
};

std::array<TeEntry, 2> te_column(int v, int n) {
  if (v < n) {
    return {{{v, kInvSqrt2}, {n + v, kInvSqrt2}}};
  }
  int q = v - n;
  const int npairs = n * (n - 1) / 2;
  const bool imag = q >= npairs;
  if (imag) q -= npairs;
  int i = 0;
  while (q >= n - 1 - i) {
    q -= n - 1 - i;
    ++i;
  }
  const int j = i + 1 + q;
  if (!imag) {
    return {{{2 * n + pair_index(i, j, 2 * n), kInvSqrt2},
             {2 * n + pair_index(n + i, n + j, 2 * n), kInvSqrt2}}};
  }
  return {{{2 * n + pair_index(i, n + j, 2 * n), -kInvSqrt2},
           {2 * n + pair_index(j, n + i, 2 * n), kInvSqrt2}}};
}

struct ConeBuild {
  ConeProgram prog;
  bool real_mode = false;
  std::vector<int> var_off;    // first cone coordinate of each public block
  std::vector<int> row_first;  // first cone row of each constraint
  std::vector<int> row_count;
};

bool detect_real(const SdpProblem& p) {
  for (const auto& k : p.objective)
    if (!is_real_mat(k)) return false;
  for (const auto& con : p.constraints) {
    if (!is_real_mat(con.bound)) return false;
    for (const auto& t : con.terms) {
      const int s = p.blocks[t.block].side;
      for (const auto& e : t.map.entries()) {
        if (is_im_coord(e.row, con.space_side) != is_im_coord(e.col, s)) return false;
      }
    }
  }
  return true;
}

ConeBuild build_cone(const SdpProblem& p, const SdpOptions& opt) {
  ConeBuild cb;
  const bool real = detect_real(p);
  cb.real_mode = real;
  const int nb = static_cast<int>(p.blocks.size());
  const int nc = static_cast<int>(p.constraints.size());

  // Variable blocks.
  cb.var_off.resize(nb);
  int off = 0;
  for (int i = 0; i < nb; ++i) {
    const auto& blk = p.blocks[i];
    cb.var_off[i] = off;
    if (blk.cone == Cone::NonnegDiag) {
      cb.prog.blocks.push_back({ConeBlock::Nonneg, blk.side});
      off += blk.side;
    } else {
      const int side = real ? blk.side : 2 * blk.side;
      if (side > opt.max_block_side)
        throw budget_error("sdp: block " + blk.name + " exceeds the size budget");
      cb.prog.blocks.push_back({ConeBlock::Psd, side});
      off += rsvec_dim(side);
    }
  }

  // Slack blocks: one PSD block per operator inequality, one pooled
  // nonnegative block for all scalar inequalities.
  std::vector<int> slack_off(nc, -1), scalar_idx(nc, -1);
  int pool = 0;
  for (int j = 0; j < nc; ++j) {
    const auto& con = p.constraints[j];
    if (con.sense != Sense::Le) continue;
    if (con.space_side == 1) {
      scalar_idx[j] = pool++;
    } else {
      const int side = real ? con.space_side : 2 * con.space_side;
      if (side > opt.max_block_side)
        throw budget_error("sdp: slack of " + con.name + " exceeds the size budget");
      slack_off[j] = off;
      cb.prog.blocks.push_back({ConeBlock::Psd, side});
      off += rsvec_dim(side);
    }
  }
  int pool_off = off;
  if (pool > 0) {
    cb.prog.blocks.push_back({ConeBlock::Nonneg, pool});
    off += pool;
  }
  const int total = off;

  long long rows_total = 0;
  for (const auto& con : p.constraints)
    rows_total += real ? rsvec_dim(con.space_side) : csvec_dim(con.space_side);
  if (rows_total > opt.max_rows)
    throw budget_error("sdp: constraint rows exceed the budget (" +
                       std::to_string(rows_total) + " > " + std::to_string(opt.max_rows) + ")");

  // Rows.
  cb.row_first.resize(nc);
  cb.row_count.resize(nc);
  cb.prog.b.resize(rows_total);
  cb.prog.rows.reserve(rows_total);
  int r = 0;
  for (int j = 0; j < nc; ++j) {
    const auto& con = p.constraints[j];
    const int k = con.space_side;
    const int mrows = real ? rsvec_dim(k) : csvec_dim(k);
    cb.row_first[j] = r;
    cb.row_count[j] = mrows;
    const VectorXd bj = csvec(hermitize(con.bound));
    std::vector<std::vector<std::pair<int, double>>> buckets(mrows);
    for (const auto& t : con.terms) {
      const auto& blk = p.blocks[t.block];
      const int voff = cb.var_off[t.block];
      for (const auto& e : t.map.entries()) {
        if (e.row >= mrows) continue;  // imaginary sector, absent in real mode
        if (blk.cone == Cone::NonnegDiag || real) {
          buckets[e.row].push_back({voff + e.col, e.val});
        } else {
          for (const auto& te : te_column(e.col, blk.side))
            buckets[e.row].push_back({voff + te.coord, e.val * te.val});
        }
      }
    }
    for (int u = 0; u < mrows; ++u) {
      auto& bk = buckets[u];
      if (con.sense == Sense::Le) {
        if (k == 1) {
          bk.push_back({pool_off + scalar_idx[j], 1.0});
        } else if (real) {
          bk.push_back({slack_off[j] + u, 1.0});
        } else {
          for (const auto& te : te_column(u, k)) bk.push_back({slack_off[j] + te.coord, te.val});
        }
      }
      std::sort(bk.begin(), bk.end());
      ConeRow row;
      row.terms.reserve(bk.size());
      for (const auto& [col, val] : bk) {
        if (!row.terms.empty() && row.terms.back().col == col)
          row.terms.back().val += val;
        else
          row.terms.push_back({col, val});
      }
      row.terms.erase(std::remove_if(row.terms.begin(), row.terms.end(),
                                     [](const SparseTerm& t) { return std::abs(t.val) < 1e-15; }),
                      row.terms.end());
      cb.prog.b[r] = bj[u];
      cb.prog.rows.push_back(std::move(row));
      ++r;
    }
  }

  // Objective, negated internally when maximizing.
  const double osgn = (p.direction == Direction::Maximize) ? -1.0 : 1.0;
  cb.prog.c = VectorXd::Zero(total);
  for (int i = 0; i < nb; ++i) {
    const auto& blk = p.blocks[i];
    const MatrixXcd k = hermitize(p.objective[i]);
    const int voff = cb.var_off[i];
    if (blk.cone == Cone::NonnegDiag) {
      for (int u = 0; u < blk.side; ++u) cb.prog.c[voff + u] = osgn * k(u, u).real();
    } else if (real) {
      cb.prog.c.segment(voff, rsvec_dim(blk.side)) = osgn * rsvec(MatrixXd(k.real()));
    } else {
      const VectorXd kv = csvec(k);
      for (int v = 0; v < kv.size(); ++v) {
        if (kv[v] == 0.0) continue;
        for (const auto& te : te_column(v, blk.side)) cb.prog.c[voff + te.coord] += osgn * kv[v] * te.val;
      }
    }
  }
  return cb;
}

MatrixXcd extract_block(const ConeBuild& cb, const SdpProblem& p, const VectorXd& x, int i) {
  const auto& blk = p.blocks[i];
  const int off = cb.var_off[i];
  if (blk.cone == Cone::NonnegDiag) {
    MatrixXcd m = MatrixXcd::Zero(blk.side, blk.side);
    for (int u = 0; u < blk.side; ++u) m(u, u) = x[off + u];
    return m;
  }
  if (cb.real_mode) {
    const MatrixXd m = rsmat(x.segment(off, rsvec_dim(blk.side)), blk.side);
    return m.cast<cxd>();
  }
  VectorXd w(csvec_dim(blk.side));
  for (int v = 0; v < w.size(); ++v) {
    double acc = 0.0;
    for (const auto& te : te_column(v, blk.side)) acc += te.val * x[off + te.coord];
    w[v] = acc;
  }
  return csmat(w, blk.side);
}

// Multiplier of constraint j recovered from a y-shaped vector; the sign
// convention makes Le multipliers positive semidefinite.
MatrixXcd extract_dual(const ConeBuild& cb, const SdpProblem& p, const VectorXd& y, int j) {
  const int k = p.constraints[j].space_side;
  VectorXd full = VectorXd::Zero(csvec_dim(k));
  for (int u = 0; u < cb.row_count[j]; ++u) full[u] = y[cb.row_first[j] + u];
  return -csmat(full, k);
}

LinMap diag_keep(int n) {
  LinMap m(n, n);
  for (int u = 0; u < n; ++u) m.add_entry(u, u, 1.0);
  return m;
}

}  // namespace

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::PrimalInfeasible: return "primal-infeasible";
    case SdpStatus::DualInfeasible: return "dual-infeasible";
    default: return "numerical-failure";
  }
}

int SdpProblem::add_block(const std::string& name, int side, Cone cone) {
  require(side >= 1, "block side must be positive");
  for (const auto& b : blocks) require(b.name != name, "duplicate block name " + name);
  blocks.push_back({name, side, cone});
  objective.push_back(MatrixXcd::Zero(side, side));
  return static_cast<int>(blocks.size()) - 1;
}

int SdpProblem::block_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(blocks.size()); ++i)
    if (blocks[i].name == name) return i;
  throw std::invalid_argument("sdp: no block named " + name);
}

void SdpProblem::set_objective(int block, const MatrixXcd& k) {
  require(block >= 0 && block < static_cast<int>(blocks.size()), "objective block out of range");
  objective[block] = k;
}

void SdpProblem::add_constraint(SdpConstraint con) { constraints.push_back(std::move(con)); }

void SdpProblem::validate() const {
  require(!blocks.empty(), "problem has no blocks");
  require(objective.size() == blocks.size(), "objective size mismatch");
  for (size_t i = 0; i < blocks.size(); ++i) {
    const auto& blk = blocks[i];
    require(blk.side >= 1, "block side must be positive");
    const auto& k = objective[i];
    require(k.rows() == blk.side && k.cols() == blk.side, "objective shape mismatch on " + blk.name);
    const double scale = 1.0 + k.cwiseAbs().maxCoeff();
    require((k - k.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
            "objective on " + blk.name + " is not Hermitian");
    if (blk.cone == Cone::NonnegDiag) {
      MatrixXcd offd = k;
      offd.diagonal().setZero();
      require(offd.cwiseAbs().maxCoeff() <= 1e-13 * scale,
              "objective on diagonal block " + blk.name + " must be diagonal");
    }
  }
  for (const auto& con : constraints) {
    require(con.space_side >= 1, "constraint space side must be positive on " + con.name);
    require(con.bound.rows() == con.space_side && con.bound.cols() == con.space_side,
            "bound shape mismatch on " + con.name);
    const double bscale = 1.0 + con.bound.cwiseAbs().maxCoeff();
    require((con.bound - con.bound.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * bscale,
            "bound on " + con.name + " is not Hermitian");
    for (const auto& t : con.terms) {
      require(t.block >= 0 && t.block < static_cast<int>(blocks.size()),
              "term block out of range on " + con.name);
      const auto& blk = blocks[t.block];
      require(t.map.in_side() == blk.side, "map input side mismatch on " + con.name);
      require(t.map.out_side() == con.space_side, "map output side mismatch on " + con.name);
      if (blk.cone == Cone::NonnegDiag) {
        for (const auto& e : t.map.entries())
          require(e.col < blk.side, "map into diagonal block " + blk.name + " uses off-diagonal coordinates");
      }
    }
  }
}

SdpSolution solve(const SdpProblem& p, const SdpOptions& opt) {
  p.validate();
  const ConeBuild cb = build_cone(p, opt);

  ConeOptions copt;
  copt.tol_gap = opt.tol_gap;
  copt.tol_feas = opt.tol_feas;
  copt.tol_cone = opt.tol_cone;
  copt.max_iter = opt.max_iter;
  copt.verbose = opt.verbose;
  const ConeSolution cs = solve_cone(cb.prog, copt);

  SdpSolution sol;
  sol.iterations = cs.iterations;
  sol.gap = cs.rel_gap;
  sol.p_res = cs.p_res;
  sol.d_res = cs.d_res;
  sol.cert_quality = cs.cert_quality;
  const double osgn = (p.direction == Direction::Maximize) ? -1.0 : 1.0;
  const int nb = static_cast<int>(p.blocks.size());
  const int nc = static_cast<int>(p.constraints.size());

  switch (cs.status) {
    case ConeStatus::Optimal: {
      sol.status = SdpStatus::Optimal;
      sol.primal_value = osgn * cs.pobj;
      sol.dual_value = osgn * cs.dobj;
      sol.block_values.reserve(nb);
      for (int i = 0; i < nb; ++i) sol.block_values.push_back(extract_block(cb, p, cs.x, i));
      sol.duals.reserve(nc);
      for (int j = 0; j < nc; ++j) sol.duals.push_back(extract_dual(cb, p, cs.y, j));
      break;
    }
    case ConeStatus::PrimalInfeasible: {
      sol.status = SdpStatus::PrimalInfeasible;
      sol.cert_duals.reserve(nc);
      for (int j = 0; j < nc; ++j) sol.cert_duals.push_back(extract_dual(cb, p, cs.cert, j));
      break;
    }
    case ConeStatus::DualInfeasible: {
      sol.status = SdpStatus::DualInfeasible;
      sol.cert_blocks.reserve(nb);
      for (int i = 0; i < nb; ++i) sol.cert_blocks.push_back(extract_block(cb, p, cs.cert, i));
      break;
    }
    default:
      sol.status = SdpStatus::NumericalFailure;
      sol.primal_value = osgn * cs.pobj;
      sol.dual_value = osgn * cs.dobj;
      sol.block_values.reserve(nb);
      if (cs.x.size() == cb.prog.total_dim())
        for (int i = 0; i < nb; ++i) sol.block_values.push_back(extract_block(cb, p, cs.x, i));
      break;
  }
  return sol;
}

const MatrixXcd& SdpSolution::block(const SdpProblem& p, const std::string& name) const {
  const int i = p.block_index(name);
  if (i >= static_cast<int>(block_values.size()))
    throw std::invalid_argument("sdp: no primal value for block " + name);
  return block_values[i];
}

SdpProblem dualize(const SdpProblem& p) {
  p.validate();
  SdpProblem d;
  const bool pmax = (p.direction == Direction::Maximize);
  d.direction = pmax ? Direction::Minimize : Direction::Maximize;
  // Max primal: min <C,Z> with -L*(Z) <= -K.  Min primal: max <-C,Z> with
  // -L*(Z) <= K.  Equality rows get sign-split multipliers.
  const double osgn = pmax ? 1.0 : -1.0;
  const double bsgn = pmax ? -1.0 : 1.0;

  const int nc = static_cast<int>(p.constraints.size());
  std::vector<int> zpos(nc), zneg(nc, -1);
  for (int j = 0; j < nc; ++j) {
    const auto& con = p.constraints[j];
    const Cone cone = (con.space_side == 1) ? Cone::NonnegDiag : Cone::Psd;
    const MatrixXcd cj = hermitize(con.bound);
    if (con.sense == Sense::Le) {
      zpos[j] = d.add_block(con.name, con.space_side, cone);
      d.set_objective(zpos[j], osgn * cj);
    } else {
      zpos[j] = d.add_block(con.name + "_pos", con.space_side, cone);
      zneg[j] = d.add_block(con.name + "_neg", con.space_side, cone);
      d.set_objective(zpos[j], osgn * cj);
      d.set_objective(zneg[j], -osgn * cj);
    }
  }

  for (int i = 0; i < static_cast<int>(p.blocks.size()); ++i) {
    const auto& blk = p.blocks[i];
    const bool diag = (blk.cone == Cone::NonnegDiag);
    SdpConstraint con;
    con.name = blk.name;
    con.space_side = blk.side;
    con.sense = Sense::Le;
    MatrixXcd kb = bsgn * hermitize(p.objective[i]);
    if (diag) {
      MatrixXcd kd = MatrixXcd::Zero(blk.side, blk.side);
      kd.diagonal() = kb.diagonal();
      kb = kd;
    }
    con.bound = kb;
    for (int j = 0; j < nc; ++j) {
      for (const auto& t : p.constraints[j].terms) {
        if (t.block != i) continue;
        LinMap adj = t.map.adjoint().scaled(-1.0);
        if (diag) adj = compose(diag_keep(blk.side), adj);
        con.terms.push_back({zpos[j], adj});
        if (zneg[j] >= 0) con.terms.push_back({zneg[j], adj.scaled(-1.0)});
      }
    }
    d.add_constraint(std::move(con));
  }
  d.validate();
  return d;
}

SlaterReport slater_check(const SdpProblem& p, const SdpOptions& opt) {
  p.validate();
  SdpProblem q;
  q.direction = Direction::Maximize;
  q.blocks = p.blocks;
  q.objective.resize(p.blocks.size());
  for (size_t i = 0; i < p.blocks.size(); ++i)
    q.objective[i] = MatrixXcd::Zero(p.blocks[i].side, p.blocks[i].side);
  const int t = q.add_block("__slater_margin", 1, Cone::NonnegDiag);
  q.set_objective(t, MatrixXcd::Ones(1, 1));

  for (const auto& pc : p.constraints) {
    SdpConstraint con = pc;
    if (con.sense == Sense::Le)
      con.terms.push_back({t, LinMap::times_op_map(MatrixXcd::Identity(con.space_side, con.space_side))});
    q.add_constraint(std::move(con));
  }
  for (int i = 0; i < static_cast<int>(p.blocks.size()); ++i) {
    const auto& blk = p.blocks[i];
    SdpConstraint con;
    con.name = blk.name + "_interior";
    con.space_side = blk.side;
    con.sense = Sense::Le;
    con.bound = MatrixXcd::Zero(blk.side, blk.side);
    con.terms.push_back({t, LinMap::times_op_map(MatrixXcd::Identity(blk.side, blk.side))});
    const LinMap back = (blk.cone == Cone::NonnegDiag) ? diag_keep(blk.side) : LinMap::identity(blk.side);
    con.terms.push_back({i, back.scaled(-1.0)});
    q.add_constraint(std::move(con));
  }
  SdpConstraint cap;
  cap.name = "__slater_cap";
  cap.space_side = 1;
  cap.sense = Sense::Le;
  cap.bound = MatrixXcd::Ones(1, 1);
  cap.terms.push_back({t, LinMap::identity(1)});
  q.add_constraint(std::move(cap));

  SlaterReport rep;
  SdpSolution sol = solve(q, opt);
  if (sol.status != SdpStatus::Optimal) return rep;
  rep.margin = sol.primal_value;
  rep.verdict = (rep.margin > 1e-6) ? SlaterVerdict::StrictlyFeasible : SlaterVerdict::BoundaryOnly;
  rep.witness.assign(sol.block_values.begin(), sol.block_values.begin() + p.blocks.size());
  return rep;
}

}  // namespace pptmc
