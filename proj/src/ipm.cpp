#include "pptmc/ipm.hpp"

#include "pptmc/svec.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <limits>

namespace pptmc {

const char* to_string(ConeStatus s) {
  switch (s) {
    case ConeStatus::Optimal: return "optimal";
    case ConeStatus::PrimalInfeasible: return "primal-infeasible";
    case ConeStatus::DualInfeasible: return "dual-infeasible";
    case ConeStatus::IterationLimit: return "iteration-limit";
    case ConeStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

int ConeProgram::total_dim() const {
  int n = 0;
  for (const auto& blk : blocks) n += blk.kind == ConeBlock::Psd ? rsvec_dim(blk.size) : blk.size;
  return n;
}

std::vector<int> ConeProgram::block_offsets() const {
  std::vector<int> off;
  int n = 0;
  for (const auto& blk : blocks) {
    off.push_back(n);
    n += blk.kind == ConeBlock::Psd ? rsvec_dim(blk.size) : blk.size;
  }
  off.push_back(n);
  return off;
}

namespace {

// rsvec coordinate -> (i, j) with i <= j, for one matrix side.
struct CoordTable {
  std::vector<int> ci, cj;
  explicit CoordTable(int n) {
    ci.resize(rsvec_dim(n));
    cj.resize(rsvec_dim(n));
    for (int k = 0; k < n; ++k) {
      ci[k] = k;
      cj[k] = k;
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        int q = n + pair_index(i, j, n);
        ci[q] = i;
        cj[q] = j;
      }
  }
};

// <E_u, W E_v W> for rsvec basis elements u=(i,j), v=(k,l), i<=j, k<=l.
inline double congruence_entry(const MatrixXd& w, int i, int j, int k, int l) {
  static const double kSqrt2 = std::sqrt(2.0);
  if (i == j) {
    if (k == l) {
      double t = w(i, k);
      return t * t;
    }
    return kSqrt2 * w(i, k) * w(i, l);
  }
  if (k == l) return kSqrt2 * w(i, k) * w(j, k);
  return w(i, k) * w(j, l) + w(i, l) * w(j, k);
}

// Any F with F F' = X; Cholesky normally, eigenvalue clamping as fallback.
struct PsdFactor {
  MatrixXd f;
  bool triangular = true;
};

PsdFactor psd_factor(const MatrixXd& x) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() == Eigen::Success) return {llt.matrixL(), true};
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(x);
  if (es.info() != Eigen::Success) throw numerical_error("psd_factor: eigensolver failed");
  VectorXd ev = es.eigenvalues();
  double floor = 1e-14 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int k = 0; k < ev.size(); ++k) ev[k] = std::sqrt(std::max(ev[k], floor));
  return {es.eigenvectors() * ev.asDiagonal(), false};
}

struct PsdWork {
  int side = 0;
  MatrixXd X, S, R, Rinv, W;
  VectorXd sigma;
  MatrixXd dxt_aff, dst_aff;
};

struct RowChunk {
  int row = 0;
  bool dense = false;
  std::vector<int> ui, uj;  // decoded coords
  std::vector<int> coord;   // local rsvec coords
  std::vector<double> val;
};

double max_step_psd(const PsdWork& wk, const MatrixXd& dt) {
  const int n = wk.side;
  MatrixXd t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j) = dt(i, j) / std::sqrt(wk.sigma[i] * wk.sigma[j]);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(t, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numerical_error("max_step: eigensolver failed");
  double lmin = es.eigenvalues()[0];
  if (lmin >= -1e-16) return 1e30;
  return 1.0 / (-lmin);
}

}  // namespace

ConeSolution solve_cone(const ConeProgram& p, const ConeOptions& opt) {
  const int m = static_cast<int>(p.rows.size());
  const int dim = p.total_dim();
  const auto off = p.block_offsets();
  const int nblocks = static_cast<int>(p.blocks.size());
  if (p.b.size() != m) throw std::invalid_argument("solve_cone: b size mismatch");
  if (p.c.size() != dim) throw std::invalid_argument("solve_cone: c size mismatch");
  if (m == 0) throw std::invalid_argument("solve_cone: program has no constraint rows");

  double nu = 0;
  for (const auto& blk : p.blocks) nu += blk.size;

  // Per-block row chunks for Schur assembly.
  std::vector<CoordTable> tables;
  std::vector<std::vector<RowChunk>> chunks(nblocks);
  for (int b = 0; b < nblocks; ++b) {
    const auto& blk = p.blocks[b];
    const CoordTable* tab = nullptr;
    if (blk.kind == ConeBlock::Psd) {
      tables.emplace_back(blk.size);
      tab = &tables.back();
    }
    for (int r = 0; r < m; ++r) {
      RowChunk ch;
      ch.row = r;
      for (const auto& t : p.rows[r].terms) {
        if (t.col < off[b] || t.col >= off[b + 1]) continue;
        int lc = t.col - off[b];
        ch.coord.push_back(lc);
        ch.val.push_back(t.val);
        if (tab) {
          ch.ui.push_back(tab->ci[lc]);
          ch.uj.push_back(tab->cj[lc]);
        }
      }
      if (ch.coord.empty()) continue;
      ch.dense = blk.kind == ConeBlock::Psd &&
                 static_cast<int>(ch.coord.size()) > std::max(8, blk.size);
      chunks[b].push_back(std::move(ch));
    }
  }

  auto a_times = [&](const VectorXd& v) {
    VectorXd r(m);
    for (int i = 0; i < m; ++i) {
      double acc = 0;
      for (const auto& t : p.rows[i].terms) acc += t.val * v[t.col];
      r[i] = acc;
    }
    return r;
  };
  auto at_times = [&](const VectorXd& y) {
    VectorXd r = VectorXd::Zero(dim);
    for (int i = 0; i < m; ++i)
      for (const auto& t : p.rows[i].terms) r[t.col] += t.val * y[i];
    return r;
  };

  // Interior start.
  double tau = std::max({1.0, p.b.cwiseAbs().maxCoeff(), p.c.cwiseAbs().maxCoeff()});
  VectorXd x = VectorXd::Zero(dim), s = VectorXd::Zero(dim);
  for (int b = 0; b < nblocks; ++b) {
    const auto& blk = p.blocks[b];
    if (blk.kind == ConeBlock::Psd) {
      for (int k = 0; k < blk.size; ++k) x[off[b] + k] = s[off[b] + k] = tau;
    } else {
      for (int k = 0; k < blk.size; ++k) x[off[b] + k] = s[off[b] + k] = tau;
    }
  }
  VectorXd y = VectorXd::Zero(m);

  ConeSolution sol;
  const double bnorm = 1.0 + p.b.norm();
  const double cnorm = 1.0 + p.c.norm();

  std::vector<PsdWork> work(nblocks);
  std::vector<VectorXd> nn_w(nblocks), nn_lam(nblocks);
  MatrixXd schur(m, m), schur_factor_input(m, m);
  Eigen::LLT<MatrixXd> llt;
  int stall = 0;

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    VectorXd rp = p.b - a_times(x);
    VectorXd rd = p.c - at_times(y) - s;
    double pobj = p.c.dot(x), dobj = p.b.dot(y);
    double gap = x.dot(s);
    double rel_gap = std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));
    double pres = rp.norm() / bnorm;
    double dres = rd.norm() / cnorm;

    sol.x = x;
    sol.y = y;
    sol.s = s;
    sol.pobj = pobj;
    sol.dobj = dobj;
    sol.rel_gap = rel_gap;
    sol.p_res = pres;
    sol.d_res = dres;
    sol.iterations = iter;

    if (opt.verbose)
      std::fprintf(stderr, "ipm iter %3d  pobj % .9e  dobj % .9e  gap %.2e  pres %.2e  dres %.2e\n",
                   iter, pobj, dobj, rel_gap, pres, dres);

    if (pres <= opt.tol_feas && dres <= opt.tol_feas && rel_gap <= opt.tol_gap) {
      sol.status = ConeStatus::Optimal;
      return sol;
    }

    // Farkas certificates from the raw iterates.
    {
      double by = p.b.dot(y);
      if (by > 1e-8 * (1.0 + y.norm())) {
        VectorXd yhat = y / by;
        VectorXd z = -at_times(yhat);
        double viol = 0, scale = 1.0 + z.cwiseAbs().maxCoeff();
        for (int b = 0; b < nblocks; ++b) {
          const auto& blk = p.blocks[b];
          if (blk.kind == ConeBlock::Psd) {
            MatrixXd zb = rsmat(z.segment(off[b], rsvec_dim(blk.size)), blk.size);
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(zb, Eigen::EigenvaluesOnly);
            viol = std::max(viol, -es.eigenvalues()[0]);
          } else {
            for (int k = 0; k < blk.size; ++k) viol = std::max(viol, -z[off[b] + k]);
          }
        }
        if (viol <= 1e-6 * scale) {
          sol.status = ConeStatus::PrimalInfeasible;
          sol.cert = yhat;
          sol.cert_quality = viol / scale;
          return sol;
        }
      }
      double cx = p.c.dot(x);
      if (cx < -1e-8 * (1.0 + x.norm())) {
        VectorXd xhat = x / (-cx);
        double viol = a_times(xhat).cwiseAbs().maxCoeff();
        double scale = 1.0 + xhat.cwiseAbs().maxCoeff();
        if (viol <= 1e-6 * scale) {
          sol.status = ConeStatus::DualInfeasible;
          sol.cert = xhat;
          sol.cert_quality = viol / scale;
          return sol;
        }
      }
    }

    if (iter == opt.max_iter) break;

    double mu = gap / nu;
    if (mu < 1e-300) break;

    // Nesterov-Todd scalings.
    for (int b = 0; b < nblocks; ++b) {
      const auto& blk = p.blocks[b];
      if (blk.kind == ConeBlock::Psd) {
        PsdWork& wk = work[b];
        wk.side = blk.size;
        wk.X = rsmat(x.segment(off[b], rsvec_dim(blk.size)), blk.size);
        wk.S = rsmat(s.segment(off[b], rsvec_dim(blk.size)), blk.size);
        PsdFactor l1 = psd_factor(wk.X), l2 = psd_factor(wk.S);
        Eigen::JacobiSVD<MatrixXd> svd(l2.f.transpose() * l1.f,
                                       Eigen::ComputeFullU | Eigen::ComputeFullV);
        VectorXd sg = svd.singularValues();
        for (int k = 0; k < sg.size(); ++k) sg[k] = std::max(sg[k], 1e-150);
        VectorXd isq = sg.cwiseSqrt().cwiseInverse();
        wk.R = l1.f * svd.matrixV() * isq.asDiagonal();
        MatrixXd l1inv =
            l1.triangular
                ? MatrixXd(l1.f.triangularView<Eigen::Lower>().solve(
                      MatrixXd::Identity(blk.size, blk.size)))
                : MatrixXd(l1.f.inverse());
        wk.Rinv = sg.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * l1inv;
        wk.sigma = sg;
        wk.W = wk.R * wk.R.transpose();
      } else {
        VectorXd xv = x.segment(off[b], blk.size), sv = s.segment(off[b], blk.size);
        nn_w[b] = (xv.cwiseQuotient(sv)).cwiseSqrt();
        nn_lam[b] = (xv.cwiseProduct(sv)).cwiseSqrt();
      }
    }

    // Schur complement M = A (W (x)_s W) A'.
    schur.setZero();
    for (int b = 0; b < nblocks; ++b) {
      const auto& blk = p.blocks[b];
      const auto& chs = chunks[b];
      if (blk.kind == ConeBlock::Nonneg) {
        const VectorXd& w = nn_w[b];
        for (size_t pi = 0; pi < chs.size(); ++pi)
          for (size_t qi = 0; qi <= pi; ++qi) {
            const RowChunk &cp = chs[pi], &cq = chs[qi];
            double acc = 0;
            size_t a = 0, c = 0;
            while (a < cp.coord.size() && c < cq.coord.size()) {
              if (cp.coord[a] < cq.coord[c]) ++a;
              else if (cp.coord[a] > cq.coord[c]) ++c;
              else {
                double wi = w[cp.coord[a]];
                acc += cp.val[a] * cq.val[c] * wi * wi;
                ++a;
                ++c;
              }
            }
            if (acc != 0.0) {
              int r0 = std::min(cp.row, cq.row), r1 = std::max(cp.row, cq.row);
              schur(r0, r1) += acc;
            }
          }
        continue;
      }
      const PsdWork& wk = work[b];
      // Dense chunks get an explicit congruence image.
      std::vector<VectorXd> dense_img(chs.size());
      for (size_t qi = 0; qi < chs.size(); ++qi) {
        if (!chs[qi].dense) continue;
        VectorXd vq = VectorXd::Zero(rsvec_dim(blk.size));
        for (size_t k = 0; k < chs[qi].coord.size(); ++k) vq[chs[qi].coord[k]] = chs[qi].val[k];
        MatrixXd bq = rsmat(vq, blk.size);
        dense_img[qi] = rsvec(wk.W * bq * wk.W);
      }
      for (size_t pi = 0; pi < chs.size(); ++pi) {
        const RowChunk& cp = chs[pi];
        for (size_t qi = 0; qi <= pi; ++qi) {
          const RowChunk& cq = chs[qi];
          double acc = 0;
          if (cq.dense || cp.dense) {
            const RowChunk& sparse_side = cq.dense ? cp : cq;
            const VectorXd& img = cq.dense ? dense_img[qi] : dense_img[pi];
            for (size_t k = 0; k < sparse_side.coord.size(); ++k)
              acc += sparse_side.val[k] * img[sparse_side.coord[k]];
          } else {
            for (size_t a = 0; a < cp.coord.size(); ++a)
              for (size_t c = 0; c < cq.coord.size(); ++c)
                acc += cp.val[a] * cq.val[c] *
                       congruence_entry(wk.W, cp.ui[a], cp.uj[a], cq.ui[c], cq.uj[c]);
          }
          if (acc != 0.0) {
            int r0 = std::min(cp.row, cq.row), r1 = std::max(cp.row, cq.row);
            schur(r0, r1) += acc;
          }
        }
      }
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < i; ++j) schur(i, j) = schur(j, i);

    double diag_scale = schur.diagonal().cwiseAbs().maxCoeff();
    double reg = 1e-13 * std::max(1.0, diag_scale);
    bool factored = false;
    for (int attempt = 0; attempt < 6 && !factored; ++attempt) {
      schur_factor_input = schur;
      schur_factor_input.diagonal().array() += reg;
      llt.compute(schur_factor_input);
      if (llt.info() == Eigen::Success) factored = true;
      else reg *= 1e3;
    }
    if (!factored) {
      sol.status = ConeStatus::NumericalFailure;
      return sol;
    }
    auto schur_solve = [&](const VectorXd& rhs) {
      VectorXd u = llt.solve(rhs);
      u += llt.solve(rhs - schur * u);  // one refinement pass
      return u;
    };

    // W z W blockwise.
    auto w_conj = [&](const VectorXd& z) {
      VectorXd r(dim);
      for (int b = 0; b < nblocks; ++b) {
        const auto& blk = p.blocks[b];
        if (blk.kind == ConeBlock::Psd) {
          const PsdWork& wk = work[b];
          MatrixXd zb = rsmat(z.segment(off[b], rsvec_dim(blk.size)), blk.size);
          r.segment(off[b], rsvec_dim(blk.size)) = rsvec(wk.W * zb * wk.W);
        } else {
          const VectorXd& w = nn_w[b];
          for (int k = 0; k < blk.size; ++k)
            r[off[b] + k] = w[k] * w[k] * z[off[b] + k];
        }
      }
      return r;
    };
    // R Q(D) R' blockwise, with Q(D)_ij = 2 D_ij / (sigma_i + sigma_j).
    auto g1_of = [&](const std::vector<MatrixXd>& dpsd, const std::vector<VectorXd>& dnn) {
      VectorXd r(dim);
      for (int b = 0; b < nblocks; ++b) {
        const auto& blk = p.blocks[b];
        if (blk.kind == ConeBlock::Psd) {
          const PsdWork& wk = work[b];
          MatrixXd q(blk.size, blk.size);
          for (int i = 0; i < blk.size; ++i)
            for (int j = 0; j < blk.size; ++j)
              q(i, j) = 2.0 * dpsd[b](i, j) / (wk.sigma[i] + wk.sigma[j]);
          r.segment(off[b], rsvec_dim(blk.size)) = rsvec(wk.R * q * wk.R.transpose());
        } else {
          const VectorXd& w = nn_w[b];
          const VectorXd& lam = nn_lam[b];
          for (int k = 0; k < blk.size; ++k)
            r[off[b] + k] = w[k] * dnn[b][k] / lam[k];
        }
      }
      return r;
    };

    std::vector<MatrixXd> dpsd(nblocks);
    std::vector<VectorXd> dnn(nblocks);
    for (int b = 0; b < nblocks; ++b) {
      const auto& blk = p.blocks[b];
      if (blk.kind == ConeBlock::Psd) {
        dpsd[b] = MatrixXd::Zero(blk.size, blk.size);
        dpsd[b].diagonal() = -work[b].sigma.cwiseProduct(work[b].sigma);
      } else {
        dnn[b] = -nn_lam[b].cwiseProduct(nn_lam[b]);
      }
    }

    VectorXd wz = w_conj(rd);
    auto newton = [&](const std::vector<MatrixXd>& dp, const std::vector<VectorXd>& dn,
                      VectorXd& dx, VectorXd& dy, VectorXd& ds) {
      VectorXd g1 = g1_of(dp, dn);
      VectorXd rhs = rp - a_times(g1) + a_times(wz);
      dy = schur_solve(rhs);
      ds = rd - at_times(dy);
      dx = g1 - w_conj(ds);
    };

    VectorXd dxa, dya, dsa;
    newton(dpsd, dnn, dxa, dya, dsa);

    // Scaled affine directions and boundary steps.
    double tp = 1e30, td = 1e30;
    for (int b = 0; b < nblocks; ++b) {
      const auto& blk = p.blocks[b];
      if (blk.kind == ConeBlock::Psd) {
        PsdWork& wk = work[b];
        MatrixXd dxm = rsmat(dxa.segment(off[b], rsvec_dim(blk.size)), blk.size);
        MatrixXd dsm = rsmat(dsa.segment(off[b], rsvec_dim(blk.size)), blk.size);
        wk.dxt_aff = wk.Rinv * dxm * wk.Rinv.transpose();
        wk.dst_aff = wk.R.transpose() * dsm * wk.R;
        tp = std::min(tp, max_step_psd(wk, wk.dxt_aff));
        td = std::min(td, max_step_psd(wk, wk.dst_aff));
      } else {
        for (int k = 0; k < blk.size; ++k) {
          double dxk = dxa[off[b] + k], dsk = dsa[off[b] + k];
          if (dxk < 0) tp = std::min(tp, -x[off[b] + k] / dxk);
          if (dsk < 0) td = std::min(td, -s[off[b] + k] / dsk);
        }
      }
    }
    double ap = std::min(1.0, tp), ad = std::min(1.0, td);
    double mu_aff = (x + ap * dxa).dot(s + ad * dsa) / nu;
    double sigma_c = std::pow(std::max(0.0, std::min(1.0, mu_aff / mu)), 3);

    // Corrector target.
    for (int b = 0; b < nblocks; ++b) {
      const auto& blk = p.blocks[b];
      if (blk.kind == ConeBlock::Psd) {
        const PsdWork& wk = work[b];
        MatrixXd cross = 0.5 * (wk.dxt_aff * wk.dst_aff + wk.dst_aff * wk.dxt_aff);
        dpsd[b] = -cross;
        dpsd[b].diagonal().array() += sigma_c * mu;
        dpsd[b].diagonal() -= wk.sigma.cwiseProduct(wk.sigma);
      } else {
        VectorXd dxt = dxa.segment(off[b], blk.size).cwiseQuotient(nn_w[b]);
        VectorXd dst = dsa.segment(off[b], blk.size).cwiseProduct(nn_w[b]);
        dnn[b] = VectorXd::Constant(blk.size, sigma_c * mu) -
                 nn_lam[b].cwiseProduct(nn_lam[b]) - dxt.cwiseProduct(dst);
      }
    }

    VectorXd dx, dy, ds;
    newton(dpsd, dnn, dx, dy, ds);

    tp = 1e30;
    td = 1e30;
    for (int b = 0; b < nblocks; ++b) {
      const auto& blk = p.blocks[b];
      if (blk.kind == ConeBlock::Psd) {
        PsdWork& wk = work[b];
        MatrixXd dxm = rsmat(dx.segment(off[b], rsvec_dim(blk.size)), blk.size);
        MatrixXd dsm = rsmat(ds.segment(off[b], rsvec_dim(blk.size)), blk.size);
        tp = std::min(tp, max_step_psd(wk, wk.Rinv * dxm * wk.Rinv.transpose()));
        td = std::min(td, max_step_psd(wk, wk.R.transpose() * dsm * wk.R));
      } else {
        for (int k = 0; k < blk.size; ++k) {
          double dxk = dx[off[b] + k], dsk = ds[off[b] + k];
          if (dxk < 0) tp = std::min(tp, -x[off[b] + k] / dxk);
          if (dsk < 0) td = std::min(td, -s[off[b] + k] / dsk);
        }
      }
    }
    ap = std::min(1.0, opt.step_frac * tp);
    ad = std::min(1.0, opt.step_frac * td);

    if (ap < 1e-10 && ad < 1e-10) {
      if (++stall >= 3) {
        sol.status = ConeStatus::NumericalFailure;
        return sol;
      }
    } else {
      stall = 0;
    }

    x += ap * dx;
    y += ad * dy;
    s += ad * ds;
  }

  sol.status = ConeStatus::IterationLimit;
  return sol;
}

}  // namespace pptmc
