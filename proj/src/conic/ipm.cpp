// Homogeneous self-dual interior-point method for
//
//   minimize c'x  s.t.  Gx + s = h,  Ax = b,  s in K
//   maximize -h'z - b'y  s.t.  G'z + A'y + c = 0,  z in K
//
// with K a product of nonnegative orthants, second-order cones and PSD cones
// (scaled svec storage). Nesterov-Todd scaling W satisfies W z = W^{-T} s =
// lambda; directions are computed in the scaled space and the KKT system is
// reduced to the normal equations in x.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include "ctent/solver.hpp"

namespace ctent {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using ColSparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Layout {
  int lp = 0;
  std::vector<int> soc;
  std::vector<int> psd;
  std::vector<int> soc_off;
  std::vector<int> psd_off;
  int size = 0;
  int degree = 0;

  void finalize() {
    int off = lp;
    soc_off.clear();
    psd_off.clear();
    for (int d : soc) {
      soc_off.push_back(off);
      off += d;
    }
    for (int d : psd) {
      psd_off.push_back(off);
      off += d * (d + 1) / 2;
    }
    size = off;
    degree = lp + static_cast<int>(soc.size()) + std::accumulate(psd.begin(), psd.end(), 0);
  }
  int psd_slots(std::size_t k) const { return psd[k] * (psd[k] + 1) / 2; }
};

VectorXd identity(const Layout& L) {
  VectorXd e = VectorXd::Zero(L.size);
  e.head(L.lp).setOnes();
  for (std::size_t k = 0; k < L.soc.size(); ++k) e(L.soc_off[k]) = 1.0;
  for (std::size_t k = 0; k < L.psd.size(); ++k)
    for (int i = 0; i < L.psd[k]; ++i) e(L.psd_off[k] + svec_index(i, i, L.psd[k])) = 1.0;
  return e;
}

// Smallest t such that x + t e lies in K.
double shift_to_cone(const Layout& L, const VectorXd& x) {
  double t = -kInf;
  if (L.lp > 0) t = std::max(t, -x.head(L.lp).minCoeff());
  for (std::size_t k = 0; k < L.soc.size(); ++k) {
    const auto blk = x.segment(L.soc_off[k], L.soc[k]);
    t = std::max(t, blk.tail(L.soc[k] - 1).norm() - blk(0));
  }
  for (std::size_t k = 0; k < L.psd.size(); ++k) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(smat(x.segment(L.psd_off[k], L.psd_slots(k))),
                                               Eigen::EigenvaluesOnly);
    t = std::max(t, -es.eigenvalues()(0));
  }
  return t;
}

VectorXd jprod(const Layout& L, const VectorXd& x, const VectorXd& y) {
  VectorXd r(L.size);
  r.head(L.lp) = x.head(L.lp).cwiseProduct(y.head(L.lp));
  for (std::size_t k = 0; k < L.soc.size(); ++k) {
    const int o = L.soc_off[k], d = L.soc[k];
    r(o) = x.segment(o, d).dot(y.segment(o, d));
    r.segment(o + 1, d - 1) = x(o) * y.segment(o + 1, d - 1) + y(o) * x.segment(o + 1, d - 1);
  }
  for (std::size_t k = 0; k < L.psd.size(); ++k) {
    const int o = L.psd_off[k], n = L.psd_slots(k);
    const MatrixXd X = smat(x.segment(o, n)), Y = smat(y.segment(o, n));
    const MatrixXd P = 0.5 * (X * Y + Y * X);
    r.segment(o, n) = svec(P);
  }
  return r;
}

// Diagonal of a PSD block of lambda (lambda is diagonal there by construction).
VectorXd psd_diag(const Layout& L, std::size_t k, const VectorXd& lam) {
  VectorXd dgl(L.psd[k]);
  for (int i = 0; i < L.psd[k]; ++i) dgl(i) = lam(L.psd_off[k] + svec_index(i, i, L.psd[k]));
  return dgl;
}

// Solves lam o t = r.
VectorXd jdiv(const Layout& L, const VectorXd& lam, const VectorXd& r) {
  VectorXd t(L.size);
  t.head(L.lp) = r.head(L.lp).cwiseQuotient(lam.head(L.lp));
  for (std::size_t k = 0; k < L.soc.size(); ++k) {
    const int o = L.soc_off[k], d = L.soc[k];
    const double l0 = lam(o);
    const auto l1 = lam.segment(o + 1, d - 1);
    const double det = (l0 - l1.norm()) * (l0 + l1.norm());
    const double t0 = (l0 * r(o) - l1.dot(r.segment(o + 1, d - 1))) / det;
    t(o) = t0;
    t.segment(o + 1, d - 1) = (r.segment(o + 1, d - 1) - t0 * l1) / l0;
  }
  for (std::size_t k = 0; k < L.psd.size(); ++k) {
    const int o = L.psd_off[k], d = L.psd[k];
    const VectorXd dgl = psd_diag(L, k, lam);
    for (int j = 0; j < d; ++j)
      for (int i = j; i < d; ++i) {
        const int idx = o + svec_index(i, j, d);
        t(idx) = 2.0 * r(idx) / (dgl(i) + dgl(j));
      }
  }
  return t;
}

double soc_step(const Eigen::Ref<const VectorXd>& x, const Eigen::Ref<const VectorXd>& d) {
  const double x1n = x.tail(x.size() - 1).norm();
  const double c = (x(0) - x1n) * (x(0) + x1n);
  const double b = x(0) * d(0) - x.tail(x.size() - 1).dot(d.tail(d.size() - 1));
  const double a = d(0) * d(0) - d.tail(d.size() - 1).squaredNorm();
  double best = kInf;
  // roots of a t^2 + 2 b t + c = 0 with c > 0
  if (a == 0.0) {
    if (b < 0.0) best = -c / (2.0 * b);
  } else {
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -(b + std::copysign(sq, b));
      const double r1 = q != 0.0 ? q / a : kInf;
      const double r2 = q != 0.0 ? c / q : kInf;
      for (double r : {r1, r2})
        if (r > 0.0) best = std::min(best, r);
    }
  }
  return best;
}

// Largest step t with lam + t d in K (lam in the interior, PSD blocks diagonal).
double max_step(const Layout& L, const VectorXd& lam, const VectorXd& d) {
  double t = kInf;
  for (int i = 0; i < L.lp; ++i)
    if (d(i) < 0.0) t = std::min(t, -lam(i) / d(i));
  for (std::size_t k = 0; k < L.soc.size(); ++k)
    t = std::min(t, soc_step(lam.segment(L.soc_off[k], L.soc[k]), d.segment(L.soc_off[k], L.soc[k])));
  for (std::size_t k = 0; k < L.psd.size(); ++k) {
    const VectorXd isq = psd_diag(L, k, lam).cwiseSqrt().cwiseInverse();
    const MatrixXd D = smat(d.segment(L.psd_off[k], L.psd_slots(k)));
    const MatrixXd M = isq.asDiagonal() * D * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const double rho = es.eigenvalues()(0);
    if (rho < 0.0) t = std::min(t, -1.0 / rho);
  }
  return t;
}

struct Scaling {
  VectorXd lp_w;
  // SOC: W = beta (2 v v' - J), W^{-1} = (2 J v v' J - J) / beta
  std::vector<VectorXd> soc_v;
  std::vector<double> soc_beta;
  std::vector<MatrixXd> soc_W, soc_Winv;
  std::vector<MatrixXd> R, Rinv;
};

enum class Op { W, Wt, Winv, WinvT };

VectorXd apply(const Layout& L, const Scaling& S, Op op, const VectorXd& x) {
  VectorXd y(L.size);
  if (op == Op::W || op == Op::Wt)
    y.head(L.lp) = S.lp_w.cwiseProduct(x.head(L.lp));
  else
    y.head(L.lp) = x.head(L.lp).cwiseQuotient(S.lp_w);
  for (std::size_t k = 0; k < L.soc.size(); ++k) {
    const int o = L.soc_off[k], d = L.soc[k];
    switch (op) {
      case Op::W: y.segment(o, d) = S.soc_W[k] * x.segment(o, d); break;
      case Op::Wt: y.segment(o, d) = S.soc_W[k].transpose() * x.segment(o, d); break;
      case Op::Winv: y.segment(o, d) = S.soc_Winv[k] * x.segment(o, d); break;
      case Op::WinvT: y.segment(o, d) = S.soc_Winv[k].transpose() * x.segment(o, d); break;
    }
  }
  for (std::size_t k = 0; k < L.psd.size(); ++k) {
    const int o = L.psd_off[k], n = L.psd_slots(k);
    const MatrixXd X = smat(x.segment(o, n));
    MatrixXd Y;
    switch (op) {
      case Op::W: Y = S.R[k].transpose() * X * S.R[k]; break;
      case Op::Wt: Y = S.R[k] * X * S.R[k].transpose(); break;
      case Op::Winv: Y = S.Rinv[k].transpose() * X * S.Rinv[k]; break;
      case Op::WinvT: Y = S.Rinv[k] * X * S.Rinv[k].transpose(); break;
    }
    y.segment(o, n) = svec(Y);
  }
  return y;
}

double jnorm(const Eigen::Ref<const VectorXd>& v) {
  const double t = v.tail(v.size() - 1).norm();
  if (!(v(0) - t > 0.0)) throw NumericalError("soc iterate left the cone");
  return std::sqrt(v(0) - t) * std::sqrt(v(0) + t);
}

void soc_dense(const VectorXd& v, double beta, MatrixXd& W, MatrixXd& Winv) {
  const int d = static_cast<int>(v.size());
  MatrixXd J = MatrixXd::Identity(d, d);
  J.bottomRightCorner(d - 1, d - 1) *= -1.0;
  W = beta * (2.0 * v * v.transpose() - J);
  const VectorXd Jv = J * v;
  Winv = (2.0 * Jv * Jv.transpose() - J) / beta;
}

void soc_nt(const Eigen::Ref<const VectorXd>& s, const Eigen::Ref<const VectorXd>& z, VectorXd& v,
            double& beta) {
  const int d = static_cast<int>(s.size());
  const double sn = jnorm(s), zn = jnorm(z);
  const VectorXd sb = s / sn, zb = z / zn;
  const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
  VectorXd wb(d);
  wb(0) = (sb(0) + zb(0)) / (2.0 * gamma);
  wb.tail(d - 1) = (sb.tail(d - 1) - zb.tail(d - 1)) / (2.0 * gamma);
  beta = std::sqrt(sn / zn);
  v = wb;
  v(0) += 1.0;
  v /= std::sqrt(2.0 * (wb(0) + 1.0));
}

// In-place update of (v, beta) from scaled iterates st = W^{-T} s, zt = W z;
// returns the new lambda block. Works on normalized quantities only.
VectorXd soc_update(VectorXd& v, double& beta, VectorXd st, VectorXd zt) {
  const int d = static_cast<int>(v.size());
  const double aa = jnorm(st), bb = jnorm(zt);
  st /= aa;
  zt /= bb;
  const double cc = std::sqrt((1.0 + st.dot(zt)) / 2.0);
  const double vs = v.dot(st);
  const double vz = v(0) * zt(0) - v.tail(d - 1).dot(zt.tail(d - 1));
  const double vq = (vs + vz) / 2.0 / cc;
  const double vu = vs - vz;
  VectorXd lam(d);
  lam(0) = cc;
  const double wk0 = 2.0 * v(0) * vq - (st(0) + zt(0)) / 2.0 / cc;
  const double dd = (v(0) * vu - st(0) / 2.0 + zt(0) / 2.0) / (wk0 + 1.0);
  lam.tail(d - 1) = 2.0 * (-dd * vq + 0.5 * vu) * v.tail(d - 1) + 0.5 * (1.0 - dd / cc) * st.tail(d - 1) +
                    0.5 * (1.0 + dd / cc) * zt.tail(d - 1);
  lam *= std::sqrt(aa * bb);
  v *= 2.0 * vq;
  v(0) -= st(0) / 2.0 / cc;
  v.tail(d - 1) += 0.5 / cc * st.tail(d - 1);
  v -= 0.5 / cc * zt;
  v(0) += 1.0;
  v /= std::sqrt(2.0 * v(0));
  beta *= std::sqrt(aa / bb);
  return lam;
}

// Nesterov-Todd scaling for a PSD pair given through factors of S and Z:
// returns the factor update T (R_new = R T) and T^{-1}, plus lambda's diagonal.
void psd_nt(const MatrixXd& S, const MatrixXd& Z, MatrixXd& T, MatrixXd& Tinv, VectorXd& lam) {
  Eigen::LLT<MatrixXd> ls(S), lz(Z);
  if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
    throw NumericalError("psd iterate left the cone");
  const MatrixXd Ls = ls.matrixL(), Lz = lz.matrixL();
  Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
  lam = svd.singularValues();
  if (!(lam.minCoeff() > 0.0)) throw NumericalError("degenerate psd scaling");
  const VectorXd isq = lam.cwiseSqrt().cwiseInverse();
  T = Ls * svd.matrixV() * isq.asDiagonal();
  Tinv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
}

// Initial scaling from (s, z); also returns lambda.
Scaling compute_scaling(const Layout& L, const VectorXd& s, const VectorXd& z, VectorXd& lam) {
  Scaling S;
  lam.resize(L.size);
  S.lp_w = s.head(L.lp).cwiseQuotient(z.head(L.lp)).cwiseSqrt();
  lam.head(L.lp) = s.head(L.lp).cwiseProduct(z.head(L.lp)).cwiseSqrt();
  for (std::size_t k = 0; k < L.soc.size(); ++k) {
    const int o = L.soc_off[k], d = L.soc[k];
    VectorXd v;
    double beta = 1.0;
    soc_nt(s.segment(o, d), z.segment(o, d), v, beta);
    MatrixXd W, Wi;
    soc_dense(v, beta, W, Wi);
    lam.segment(o, d) = W * z.segment(o, d);
    S.soc_v.push_back(v);
    S.soc_beta.push_back(beta);
    S.soc_W.push_back(W);
    S.soc_Winv.push_back(Wi);
  }
  for (std::size_t k = 0; k < L.psd.size(); ++k) {
    const int o = L.psd_off[k], n = L.psd_slots(k);
    MatrixXd T, Ti;
    VectorXd dg;
    psd_nt(smat(s.segment(o, n)), smat(z.segment(o, n)), T, Ti, dg);
    S.R.push_back(T);
    S.Rinv.push_back(Ti);
    lam.segment(o, n) = svec(MatrixXd(dg.asDiagonal()));
  }
  return S;
}

// Scaling update from the new scaled iterates st = W^{-T}s_new, zt = W z_new.
void update_scaling(const Layout& L, Scaling& S, const VectorXd& st, const VectorXd& zt, VectorXd& lam) {
  if (L.lp > 0) {
    if (!(st.head(L.lp).minCoeff() > 0.0) || !(zt.head(L.lp).minCoeff() > 0.0))
      throw NumericalError("lp iterate left the cone");
    S.lp_w = S.lp_w.cwiseProduct(st.head(L.lp).cwiseQuotient(zt.head(L.lp)).cwiseSqrt());
    lam.head(L.lp) = st.head(L.lp).cwiseProduct(zt.head(L.lp)).cwiseSqrt();
  }
  for (std::size_t k = 0; k < L.soc.size(); ++k) {
    const int o = L.soc_off[k], d = L.soc[k];
    lam.segment(o, d) = soc_update(S.soc_v[k], S.soc_beta[k], st.segment(o, d), zt.segment(o, d));
    soc_dense(S.soc_v[k], S.soc_beta[k], S.soc_W[k], S.soc_Winv[k]);
  }
  for (std::size_t k = 0; k < L.psd.size(); ++k) {
    const int o = L.psd_off[k], n = L.psd_slots(k);
    MatrixXd T, Ti;
    VectorXd dg;
    psd_nt(smat(st.segment(o, n)), smat(zt.segment(o, n)), T, Ti, dg);
    S.R[k] = S.R[k] * T;
    S.Rinv[k] = Ti * S.Rinv[k];
    lam.segment(o, n) = svec(MatrixXd(dg.asDiagonal()));
  }
}

// Cone-ordered data extracted from a ConicProgram.
struct StandardForm {
  Layout L;
  VectorXd c;
  ColSparse G;
  VectorXd h;
  ColSparse A;
  VectorXd b;
  std::vector<int> g_rows;  // original row of each cone-ordered row
  std::vector<int> a_rows;  // original row of each equality row
};

StandardForm standardize(const ConicProgram& p) {
  StandardForm f;
  std::vector<const ConeBlock*> lp, soc, psd, zero;
  for (const auto& blk : p.cones) {
    switch (blk.cone.kind) {
      case ConeKind::zero: zero.push_back(&blk); break;
      case ConeKind::nonnegative: lp.push_back(&blk); break;
      case ConeKind::second_order: soc.push_back(&blk); break;
      case ConeKind::psd_triangle: psd.push_back(&blk); break;
    }
  }
  auto take = [](const std::vector<const ConeBlock*>& blocks, std::vector<int>& rows) {
    for (const ConeBlock* blk : blocks)
      for (int r = blk->rows.start; r < blk->rows.end(); ++r) rows.push_back(r);
  };
  take(zero, f.a_rows);
  take(lp, f.g_rows);
  take(soc, f.g_rows);
  take(psd, f.g_rows);
  for (const ConeBlock* blk : lp) f.L.lp += blk->cone.dim;
  for (const ConeBlock* blk : soc) f.L.soc.push_back(blk->cone.dim);
  for (const ConeBlock* blk : psd) f.L.psd.push_back(blk->cone.dim);
  f.L.finalize();

  auto gather = [&p](const std::vector<int>& rows, ColSparse& M, VectorXd& rhs) {
    std::vector<Eigen::Triplet<double>> trips;
    rhs.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (SparseRows::InnerIterator it(p.coeffs, rows[i]); it; ++it)
        trips.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), it.value());
      rhs(static_cast<Eigen::Index>(i)) = p.rhs(rows[i]);
    }
    M.resize(static_cast<Eigen::Index>(rows.size()), p.num_vars);
    M.setFromTriplets(trips.begin(), trips.end());
  };
  gather(f.g_rows, f.G, f.h);
  gather(f.a_rows, f.A, f.b);
  f.c = p.sense == Sense::minimize ? p.objective : VectorXd(-p.objective);
  return f;
}

// Normal-equation KKT solver for
//   [0 A' G'; A 0 0; G 0 -W'W] [ux; uy; uz] = [bx; by; bz].
class KktSolver {
 public:
  explicit KktSolver(const StandardForm& f) : f_(f) {
    const Layout& L = f.L;
    psd_entries_.resize(L.psd.size());
    for (int j = 0; j < f.G.outerSize(); ++j)
      for (ColSparse::InnerIterator it(f.G, j); it; ++it) {
        const int r = static_cast<int>(it.row());
        for (std::size_t k = 0; k < L.psd.size(); ++k)
          if (r >= L.psd_off[k] && r < L.psd_off[k] + L.psd_slots(k))
            psd_entries_[k].push_back({j, r - L.psd_off[k], it.value()});
      }
    Ad_ = MatrixXd(f.A);
  }

  void factor(const Scaling& S) {
    S_ = &S;
    const Layout& L = f_.L;
    const int n = static_cast<int>(f_.c.size());
    Gs_ = MatrixXd::Zero(L.size, n);
    if (L.lp > 0) {
      Gs_.topRows(L.lp) = MatrixXd(f_.G.topRows(L.lp));
      Gs_.topRows(L.lp).array().colwise() /= S.lp_w.array();
    }
    for (std::size_t k = 0; k < L.soc.size(); ++k) {
      const int o = L.soc_off[k], d = L.soc[k];
      const MatrixXd Gk = MatrixXd(f_.G.middleRows(o, d));
      Gs_.middleRows(o, d) = S.soc_Winv[k].transpose() * Gk;
    }
    for (std::size_t k = 0; k < L.psd.size(); ++k) {
      const int o = L.psd_off[k], d = L.psd[k];
      const MatrixXd& Ri = S.Rinv[k];
      const auto& ents = psd_entries_[k];
      std::size_t e = 0;
      while (e < ents.size()) {
        const int col = ents[e].col;
        MatrixXd acc = MatrixXd::Zero(d, d);
        for (; e < ents.size() && ents[e].col == col; ++e) {
          int i = 0, jj = 0;
          slot_to_ij(ents[e].slot, d, i, jj);
          if (i == jj) {
            acc.noalias() += ents[e].value * Ri.col(i) * Ri.col(i).transpose();
          } else {
            const double v = ents[e].value / kSqrt2;
            acc.noalias() += v * (Ri.col(i) * Ri.col(jj).transpose() + Ri.col(jj) * Ri.col(i).transpose());
          }
        }
        Gs_.col(col).segment(o, L.psd_slots(k)) = svec(acc);
      }
    }

    MatrixXd H = MatrixXd::Zero(n, n);
    H.selfadjointView<Eigen::Lower>().rankUpdate(Gs_.transpose());
    if (Ad_.rows() > 0) H.selfadjointView<Eigen::Lower>().rankUpdate(Ad_.transpose());
    H = H.selfadjointView<Eigen::Lower>();
    const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    double reg = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      MatrixXd Hr = H;
      Hr.diagonal().array() += reg;
      llt_.compute(Hr);
      if (llt_.info() == Eigen::Success) break;
      reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
      if (attempt == 7) throw NumericalError("normal matrix factorization failed");
    }
    if (Ad_.rows() > 0) {
      AMi_ = llt_.solve(Ad_.transpose());  // M^{-1} A'
      MatrixXd Sc = Ad_ * AMi_;
      const double sscale = std::max(1.0, Sc.diagonal().cwiseAbs().maxCoeff());
      double sreg = 0.0;
      for (int attempt = 0; attempt < 8; ++attempt) {
        MatrixXd Sr = Sc;
        Sr.diagonal().array() += sreg;
        schur_.compute(Sr);
        if (schur_.info() == Eigen::Success) break;
        sreg = sreg == 0.0 ? 1e-14 * sscale : sreg * 100.0;
        if (attempt == 7) throw NumericalError("schur complement factorization failed");
      }
    }
  }

  // Returns ux, uy, uz and wz = W uz.
  void solve(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& ux, VectorXd& uy,
             VectorXd& uz, VectorXd& wz) const {
    solve_once(bx, by, bz, ux, uy, wz);
    for (int round = 0; round < 3; ++round) {
      uz = apply(f_.L, *S_, Op::Winv, wz);
      const VectorXd rx = bx - f_.A.transpose() * uy - f_.G.transpose() * uz;
      const VectorXd ry = by - f_.A * ux;
      const VectorXd rz = bz - f_.G * ux + apply(f_.L, *S_, Op::Wt, wz);
      const double rn = std::max({rx.lpNorm<Eigen::Infinity>(), ry.size() ? ry.lpNorm<Eigen::Infinity>() : 0.0,
                                  rz.size() ? rz.lpNorm<Eigen::Infinity>() : 0.0});
      const double bn = std::max({1e-300, bx.lpNorm<Eigen::Infinity>(),
                                  by.size() ? by.lpNorm<Eigen::Infinity>() : 0.0,
                                  bz.size() ? bz.lpNorm<Eigen::Infinity>() : 0.0});
      if (rn <= 1e-15 * bn) break;
      VectorXd dx, dy, dwz;
      solve_once(rx, ry, rz, dx, dy, dwz);
      ux += dx;
      uy += dy;
      wz += dwz;
    }
    uz = apply(f_.L, *S_, Op::Winv, wz);
  }

 private:
  struct Entry {
    int col;
    int slot;
    double value;
  };

  static void slot_to_ij(int slot, int d, int& i, int& j) {
    int col = 0, start = 0;
    while (slot >= start + (d - col)) {
      start += d - col;
      ++col;
    }
    j = col;
    i = col + (slot - start);
  }

  void solve_once(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& ux, VectorXd& uy,
                  VectorXd& wz) const {
    const VectorXd wbz = apply(f_.L, *S_, Op::WinvT, bz);
    VectorXd r1 = bx + Gs_.transpose() * wbz;
    if (Ad_.rows() > 0) {
      r1 += Ad_.transpose() * by;
      const VectorXd Mr = llt_.solve(r1);
      uy = schur_.solve(Ad_ * Mr - by);
      ux = Mr - AMi_ * uy;
    } else {
      uy.resize(0);
      ux = llt_.solve(r1);
    }
    wz = Gs_ * ux - wbz;
  }

  const StandardForm& f_;
  const Scaling* S_ = nullptr;
  std::vector<std::vector<Entry>> psd_entries_;
  MatrixXd Ad_;
  MatrixXd Gs_;
  MatrixXd AMi_;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::LLT<MatrixXd> schur_;
};

double safe_norm(const VectorXd& v) { return v.size() ? v.norm() : 0.0; }

}  // namespace

ConicSolution solve(const ConicProgram& program, const SolverOptions& opts) {
  if (const auto problems = validate(program); !problems.empty())
    throw std::invalid_argument("malformed conic program: " + problems.front());

  const StandardForm f = standardize(program);
  const Layout& L = f.L;
  const int n = program.num_vars;
  const double tol = opts.tol;

  ConicSolution sol;
  sol.primal = VectorXd::Zero(n);
  sol.dual = VectorXd::Zero(program.num_rows());

  const double resx0 = std::max(1.0, f.c.norm());
  const double resy0 = std::max(1.0, safe_norm(f.b));
  const double resz0 = std::max(1.0, safe_norm(f.h));

  KktSolver kkt(f);
  VectorXd x, y, z, s, lam;
  double tau = 1.0, kappa = 1.0;
  Scaling W;

  auto finish_optimal = [&](const VectorXd& xs, const VectorXd& ys, const VectorXd& zs) {
    sol.status = SolveStatus::optimal;
    sol.primal = xs;
    for (std::size_t i = 0; i < f.a_rows.size(); ++i) sol.dual(f.a_rows[i]) = ys(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < f.g_rows.size(); ++i) sol.dual(f.g_rows[i]) = zs(static_cast<Eigen::Index>(i));
    sol.objective_value = program.objective.dot(xs) + program.offset;
    sol.dual_value = dual_objective(program, sol.dual);
  };

  try {
    // Identity scaling for the starting point.
    W.lp_w = VectorXd::Ones(L.lp);
    for (int d : L.soc) {
      W.soc_v.push_back(VectorXd::Unit(d, 0));
      W.soc_beta.push_back(1.0);
      W.soc_W.push_back(MatrixXd::Identity(d, d));
      W.soc_Winv.push_back(MatrixXd::Identity(d, d));
    }
    for (int d : L.psd) {
      W.R.push_back(MatrixXd::Identity(d, d));
      W.Rinv.push_back(MatrixXd::Identity(d, d));
    }
    kkt.factor(W);
    VectorXd wz;
    kkt.solve(VectorXd::Zero(n), f.b, f.h, x, y, z, wz);
    s = -z;
    VectorXd x2, y2;
    kkt.solve(-f.c, VectorXd::Zero(f.b.size()), VectorXd::Zero(L.size), x2, y, z, wz);
    const VectorXd e = identity(L);
    if (L.size > 0) {
      const double ts = shift_to_cone(L, s);
      if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
      const double tz = shift_to_cone(L, z);
      if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
    }

    double best_merit = kInf;
    for (int iter = 0; iter <= opts.max_iterations; ++iter) {
      sol.iterations = iter;
      const VectorXd hrx = -(f.A.transpose() * y) - f.G.transpose() * z;
      const VectorXd hry = f.A * x;
      const VectorXd hrz = s + f.G * x;
      const VectorXd Rx = -hrx + f.c * tau;
      const VectorXd Ry = -hry + f.b * tau;
      const VectorXd Rz = hrz - f.h * tau;
      const double cx = f.c.dot(x), by = f.b.size() ? f.b.dot(y) : 0.0, hz = f.h.size() ? f.h.dot(z) : 0.0;
      const double Rt = kappa + cx + by + hz;
      const double sz = s.size() ? s.dot(z) : 0.0;
      const double mu = (sz + tau * kappa) / (L.degree + 1);

      const double pcost = cx / tau, dcost = -(by + hz) / tau;
      const double pres = std::max(safe_norm(Ry) / resy0, safe_norm(Rz) / resz0) / tau;
      const double dres = safe_norm(Rx) / resx0 / tau;
      const double relgap = (sz / (tau * tau)) / std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
      const double pinf = (hz + by < 0.0) ? safe_norm(hrx) / resx0 / (-(hz + by)) : kInf;
      const double dinf =
          (cx < 0.0) ? std::max(safe_norm(hry) / resy0, safe_norm(hrz) / resz0) / (-cx) : kInf;

      if (opts.verbose)
        std::fprintf(stderr, "%3d pcost %+.9e dcost %+.9e gap %.2e pres %.2e dres %.2e k/t %.2e\n", iter, pcost,
                     dcost, relgap, pres, dres, kappa / tau);

      const double merit = std::max({pres, dres, relgap});
      if (merit < best_merit) {
        best_merit = merit;
        sol.gap = relgap;
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        finish_optimal(x / tau, y / tau, z / tau);
        sol.status = SolveStatus::numerical_failure;
      }
      if (pres <= tol && dres <= tol && relgap <= tol) {
        sol.status = SolveStatus::optimal;
        return sol;
      }
      if (pinf <= tol) {
        sol.status = SolveStatus::infeasible;
        const double scale = -(hz + by);
        for (std::size_t i = 0; i < f.a_rows.size(); ++i)
          sol.dual(f.a_rows[i]) = y(static_cast<Eigen::Index>(i)) / scale;
        for (std::size_t i = 0; i < f.g_rows.size(); ++i)
          sol.dual(f.g_rows[i]) = z(static_cast<Eigen::Index>(i)) / scale;
        sol.primal.setZero();
        sol.objective_value = program.sense == Sense::minimize ? kInf : -kInf;
        return sol;
      }
      if (dinf <= tol) {
        sol.status = SolveStatus::unbounded;
        sol.primal = x / (-cx);
        sol.objective_value = program.sense == Sense::minimize ? -kInf : kInf;
        return sol;
      }
      if (iter == opts.max_iterations) break;

      if (iter == 0) W = compute_scaling(L, s, z, lam);
      kkt.factor(W);

      VectorXd x1, y1, z1, wz1;
      kkt.solve(-f.c, f.b, f.h, x1, y1, z1, wz1);
      const double denom = -wz1.squaredNorm() - kappa / tau;

      VectorXd dsa, dza;  // affine scaled directions
      double dtau_a = 0.0, dkap_a = 0.0, sigma = 0.0;
      VectorXd dx, dy, dz, dwz, dst;
      double dtau = 0.0, dkap = 0.0, step = 0.0;
      const VectorXd e_l = identity(L);

      for (int pass = 0; pass < 2; ++pass) {
        const double eta = pass == 0 ? 1.0 : 1.0 - sigma;
        VectorXd rs = -jprod(L, lam, lam);
        double rk = -tau * kappa;
        if (pass == 1) {
          rs += sigma * mu * e_l - jprod(L, dsa, dza);
          rk += sigma * mu - dtau_a * dkap_a;
        }
        const VectorXd t = jdiv(L, lam, rs);
        VectorXd x0, y0, z0, wz0;
        kkt.solve(-eta * Rx, eta * Ry, -eta * Rz - apply(L, W, Op::Wt, t), x0, y0, z0, wz0);
        const double lin0 = f.c.dot(x0) + (f.b.size() ? f.b.dot(y0) : 0.0) + (f.h.size() ? f.h.dot(z0) : 0.0);
        dtau = (-eta * Rt - rk / tau - lin0) / denom;
        dx = x0 + dtau * x1;
        dy = y0 + dtau * y1;
        dz = z0 + dtau * z1;
        dwz = wz0 + dtau * wz1;
        dst = t - dwz;
        dkap = (rk - kappa * dtau) / tau;

        double amax = std::min(max_step(L, lam, dst), max_step(L, lam, dwz));
        if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
        if (dkap < 0.0) amax = std::min(amax, -kappa / dkap);
        if (pass == 0) {
          step = std::min(1.0, amax);
          sigma = std::pow(1.0 - step, 3);
          dsa = dst;
          dza = dwz;
          dtau_a = dtau;
          dkap_a = dkap;
        } else {
          step = std::min(1.0, 0.99 * amax);
        }
      }
      if (!(step > 1e-12)) throw NumericalError("step length vanished");

      x += step * dx;
      y += step * dy;
      tau += step * dtau;
      kappa += step * dkap;
      const VectorXd st = lam + step * dst;
      const VectorXd zt = lam + step * dwz;
      update_scaling(L, W, st, zt, lam);
      s = apply(L, W, Op::Wt, lam);
      z = apply(L, W, Op::Winv, lam);
      if (!x.allFinite() || !std::isfinite(tau)) throw NumericalError("non-finite iterate");
    }
  } catch (const NumericalError& err) {
    if (opts.verbose) std::fprintf(stderr, "ipm: %s\n", err.what());
  }
  sol.status = SolveStatus::numerical_failure;
  return sol;
}

}  // namespace ctent
