#include "recov/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace recov {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Blocks = std::vector<Mat>;

// Symmetric coefficient matrix restricted to the blocks it touches.
struct Coefficient {
  std::vector<std::pair<std::size_t, Mat>> parts;
};

Coefficient compile(const std::vector<SdpEntry>& entries, const std::vector<Index>& sides)
{
  std::map<std::size_t, Mat> acc;
  for (const auto& e : entries) {
    auto it = acc.find(e.block);
    if (it == acc.end())
      it = acc.emplace(e.block, Mat::Zero(sides[e.block], sides[e.block])).first;
    it->second(e.row, e.col) += 0.5 * e.value;
    it->second(e.col, e.row) += 0.5 * e.value;
  }
  Coefficient c;
  for (auto& [block, m] : acc)
    if (m.cwiseAbs().maxCoeff() > 0.0)
      c.parts.emplace_back(block, std::move(m));
  return c;
}

double dot(const Coefficient& a, const Blocks& x)
{
  double s = 0.0;
  for (const auto& [block, m] : a.parts)
    s += m.cwiseProduct(x[block]).sum();
  return s;
}

double dot(const Blocks& a, const Blocks& b)
{
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double norm(const Blocks& a)
{
  return std::sqrt(dot(a, a));
}

Blocks zeros(const std::vector<Index>& sides)
{
  Blocks out;
  for (Index n : sides)
    out.push_back(Mat::Zero(n, n));
  return out;
}

Blocks dense(const Coefficient& c, const std::vector<Index>& sides)
{
  Blocks out = zeros(sides);
  for (const auto& [block, m] : c.parts)
    out[block] = m;
  return out;
}

void axpy(Blocks& y, double a, const Blocks& x)
{
  for (std::size_t k = 0; k < y.size(); ++k)
    y[k] += a * x[k];
}

Blocks symmetrized(Blocks x)
{
  for (auto& m : x)
    m = 0.5 * (m + m.transpose()).eval();
  return x;
}

// Largest alpha with X + alpha dX PSD (infinity if unbounded).
double max_step(const Blocks& x, const Blocks& dx)
{
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k].rows() == 0)
      continue;
    Eigen::LLT<Mat> llt(x[k]);
    if (llt.info() != Eigen::Success)
      return 0.0;
    Mat t = llt.matrixL().solve(dx[k]);
    t = llt.matrixL().solve(t.transpose()).transpose().eval();
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(t, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0)
      alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

struct NtScaling {
  Mat g;     // W = G G^T, G^{-1} X G^{-T} = G^T Z G = diag(d)
  Mat ginv;
  Mat w;
  Vec d;
};

bool nt_scaling(const Mat& x, const Mat& z, NtScaling& s)
{
  Eigen::LLT<Mat> lx(x), lz(z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success)
    return false;
  const Mat l = lx.matrixL();
  const Mat r = lz.matrixL();
  Eigen::JacobiSVD<Mat> svd(r.transpose() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  s.d = svd.singularValues();
  if (s.d.size() > 0 && !(s.d.minCoeff() > 0.0))
    return false;
  const Mat& v = svd.matrixV();
  s.g = l * v * s.d.cwiseInverse().cwiseSqrt().asDiagonal();
  const Mat linv = lx.matrixL().solve(Mat::Identity(x.rows(), x.cols()));
  s.ginv = s.d.cwiseSqrt().asDiagonal() * v.transpose() * linv;
  s.w = s.g * s.g.transpose();
  return true;
}

// Constraints that survive presolve, with the index map back to the input.
struct Presolved {
  std::vector<std::size_t> kept;
  bool consistent = true;
};

Presolved remove_dependent(const std::vector<Coefficient>& a, const Vec& b,
                           const std::vector<Index>& sides)
{
  Presolved out;
  const auto m = static_cast<Index>(a.size());
  if (m == 0)
    return out;
  std::vector<Index> offset(sides.size() + 1, 0);
  for (std::size_t k = 0; k < sides.size(); ++k)
    offset[k + 1] = offset[k] + sides[k] * (sides[k] + 1) / 2;
  // svec coordinates: <A, X> becomes a Euclidean inner product
  Mat at = Mat::Zero(offset.back(), m);
  const double root2 = std::sqrt(2.0);
  for (Index i = 0; i < m; ++i)
    for (const auto& [block, c] : a[static_cast<std::size_t>(i)].parts) {
      Index pos = offset[block];
      for (Index col = 0; col < c.cols(); ++col)
        for (Index row = 0; row <= col; ++row)
          at(pos++, i) = row == col ? c(row, col) : root2 * c(row, col);
    }
  Eigen::ColPivHouseholderQR<Mat> qr(at);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  std::vector<std::size_t> kept;
  for (Index k = 0; k < rank; ++k)
    kept.push_back(static_cast<std::size_t>(qr.colsPermutation().indices()(k)));
  std::sort(kept.begin(), kept.end());
  out.kept = kept;
  if (rank == m)
    return out;

  // dropped rows must be consistent combinations of kept ones
  Mat ak(at.rows(), rank);
  Vec bk(rank);
  for (Index k = 0; k < rank; ++k) {
    ak.col(k) = at.col(static_cast<Index>(kept[static_cast<std::size_t>(k)]));
    bk(k) = b(static_cast<Index>(kept[static_cast<std::size_t>(k)]));
  }
  Eigen::ColPivHouseholderQR<Mat> qk(ak);
  for (Index i = 0; i < m; ++i) {
    if (std::binary_search(kept.begin(), kept.end(), static_cast<std::size_t>(i)))
      continue;
    const Vec coeff = qk.solve(Vec(at.col(i)));
    if (std::abs(coeff.dot(bk) - b(i)) > 1e-8 * (1.0 + std::abs(b(i))))
      out.consistent = false;
  }
  return out;
}

}  // namespace

Index SdpProblem::total_dimension() const
{
  Index n = 0;
  for (Index s : blocks)
    n += s;
  return n;
}

void SdpProblem::validate() const
{
  auto check = [&](const SdpEntry& e) {
    if (e.block >= blocks.size())
      throw std::invalid_argument("SdpProblem: entry refers to a missing block");
    const Index n = blocks[e.block];
    if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n)
      throw std::invalid_argument("SdpProblem: entry outside its block");
    if (!std::isfinite(e.value))
      throw std::invalid_argument("SdpProblem: non-finite coefficient");
  };
  for (Index s : blocks)
    if (s < 1)
      throw std::invalid_argument("SdpProblem: block side must be >= 1");
  for (const auto& e : objective)
    check(e);
  for (const auto& c : constraints) {
    for (const auto& e : c.entries)
      check(e);
    if (!std::isfinite(c.rhs))
      throw std::invalid_argument("SdpProblem: non-finite right-hand side");
  }
}

std::string to_string(SdpStatus s)
{
  switch (s) {
    case SdpStatus::kOptimal:
      return "optimal";
    case SdpStatus::kInfeasible:
      return "infeasible";
    case SdpStatus::kDualInfeasible:
      return "dual-infeasible";
    case SdpStatus::kMaxIter:
      return "max-iter";
  }
  return "unknown";
}

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& opts)
{
  problem.validate();
  const auto& sides = problem.blocks;
  const Index total = problem.total_dimension();

  std::vector<Coefficient> all;
  Vec b_all(static_cast<Index>(problem.constraints.size()));
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    all.push_back(compile(problem.constraints[i].entries, sides));
    b_all(static_cast<Index>(i)) = problem.constraints[i].rhs;
  }
  const Blocks c = dense(compile(problem.objective, sides), sides);

  SdpSolution sol;
  sol.dual = Vec::Zero(b_all.size());

  const Presolved pre = remove_dependent(all, b_all, sides);
  sol.dropped_constraints = static_cast<int>(all.size() - pre.kept.size());
  std::vector<Coefficient> a;
  Vec b(static_cast<Index>(pre.kept.size()));
  for (std::size_t k = 0; k < pre.kept.size(); ++k) {
    a.push_back(all[pre.kept[k]]);
    b(static_cast<Index>(k)) = b_all(static_cast<Index>(pre.kept[k]));
  }
  const auto m = static_cast<Index>(a.size());

  auto apply_a = [&](const Blocks& x) {
    Vec out(m);
    for (Index i = 0; i < m; ++i)
      out(i) = dot(a[static_cast<std::size_t>(i)], x);
    return out;
  };
  auto apply_at = [&](const Vec& y) {
    Blocks out = zeros(sides);
    for (Index i = 0; i < m; ++i)
      for (const auto& [block, mat] : a[static_cast<std::size_t>(i)].parts)
        out[block] += y(i) * mat;
    return out;
  };

  // Scaled-identity start.
  Blocks x, z;
  const double norm_c = norm(c);
  for (std::size_t k = 0; k < sides.size(); ++k) {
    const double nk = static_cast<double>(sides[k]);
    double xi = std::max(10.0, std::sqrt(nk));
    double eta = std::max(10.0, std::sqrt(nk));
    double amax = 0.0;
    for (Index i = 0; i < m; ++i)
      for (const auto& [block, mat] : a[static_cast<std::size_t>(i)].parts)
        if (block == k) {
          const double an = mat.norm();
          amax = std::max(amax, an);
          xi = std::max(xi, nk * (1.0 + std::abs(b(i))) / (1.0 + an));
        }
    eta = std::max(eta, (1.0 + std::max(amax, c[k].norm())) / std::sqrt(nk));
    x.push_back(xi * Mat::Identity(sides[k], sides[k]));
    z.push_back(eta * Mat::Identity(sides[k], sides[k]));
  }
  Vec y = Vec::Zero(m);

  const double norm_b = b.norm();
  auto finish = [&](SdpStatus status) {
    sol.status = status;
    sol.primal = x;
    sol.slack = z;
    for (std::size_t k = 0; k < pre.kept.size(); ++k)
      sol.dual(static_cast<Index>(pre.kept[k])) = y(static_cast<Index>(k));
    sol.primal_objective = dot(c, x);
    sol.dual_objective = b.dot(y);
    sol.gap = std::abs(sol.primal_objective - sol.dual_objective);
    sol.primal_residual = (b - apply_a(x)).norm();
    Blocks rd = c;
    axpy(rd, -1.0, z);
    axpy(rd, -1.0, apply_at(y));
    sol.dual_residual = norm(rd);
    return sol;
  };

  if (!pre.consistent)
    return finish(SdpStatus::kInfeasible);

  auto acceptable = [&](double pobj, double pres, double dres, double gap) {
    return gap <= 1e-7 * (1.0 + std::abs(pobj)) && pres <= 1e-8 * (1.0 + norm_b) &&
           dres <= 1e-8 * (1.0 + norm_c);
  };

  // Best iterate meeting the acceptance tolerances. Near degenerate optima the
  // Schur complement loses accuracy and the residuals can drift back up; the
  // run then falls back to this iterate.
  struct Snapshot {
    Blocks x, z;
    Vec y;
    double merit = std::numeric_limits<double>::infinity();
  } best;
  auto restore_best = [&]() {
    x = best.x;
    z = best.z;
    y = best.y;
    return finish(SdpStatus::kOptimal);
  };

  int stalled = 0;
  for (int it = 0;; ++it) {
    const Vec rp = b - apply_a(x);
    Blocks rd = c;
    axpy(rd, -1.0, z);
    axpy(rd, -1.0, apply_at(y));
    const double pobj = dot(c, x);
    const double dobj = b.dot(y);
    const double xz = dot(x, z);
    const double mu = xz / static_cast<double>(total);
    const double pinf = rp.norm() / (1.0 + norm_b);
    const double dinf = norm(rd) / (1.0 + norm_c);
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    SdpIterate rec;
    rec.iteration = it;
    rec.primal_objective = pobj;
    rec.dual_objective = dobj;
    rec.primal_infeasibility = pinf;
    rec.dual_infeasibility = dinf;
    rec.complementarity = xz;
    sol.history.push_back(rec);
    sol.iterations = it;

    if (pinf <= opts.feasibility_tol && dinf <= opts.feasibility_tol && rel_gap <= opts.gap_tol)
      return finish(SdpStatus::kOptimal);

    const double merit = std::max({rel_gap, pinf, dinf});
    if (acceptable(pobj, rp.norm(), norm(rd), std::abs(pobj - dobj)) && merit < best.merit) {
      best.x = x;
      best.z = z;
      best.y = y;
      best.merit = merit;
    }
    if (std::isfinite(best.merit) && merit > 100.0 * best.merit)
      return restore_best();

    // Infeasibility certificates along diverging iterates.
    if (dobj > 0.0) {
      Blocks aty_z = apply_at(y);
      axpy(aty_z, 1.0, z);
      if (norm(aty_z) / dobj < 1e-8 && dobj > 1e6)
        return finish(SdpStatus::kInfeasible);
    }
    if (pobj < 0.0 && apply_a(x).norm() / -pobj < 1e-8 && -pobj > 1e6)
      return finish(SdpStatus::kDualInfeasible);

    const bool out_of_budget = it >= opts.max_iterations || stalled >= 3;
    if (out_of_budget) {
      if (std::isfinite(best.merit))
        return restore_best();
      return finish(SdpStatus::kMaxIter);
    }

    std::vector<NtScaling> nt(sides.size());
    bool scaled = true;
    for (std::size_t k = 0; k < sides.size() && scaled; ++k)
      scaled = nt_scaling(x[k], z[k], nt[k]);
    if (!scaled) {
      if (std::isfinite(best.merit))
        return restore_best();
      return finish(SdpStatus::kMaxIter);
    }

    auto wxw = [&](const Blocks& v) {
      Blocks out(v.size());
      for (std::size_t k = 0; k < v.size(); ++k)
        out[k] = nt[k].w * v[k] * nt[k].w;
      return out;
    };

    // Schur complement M_ij = <A_i, W A_j W>
    Mat schur(m, m);
    for (Index j = 0; j < m; ++j) {
      Blocks wajw = zeros(sides);
      for (const auto& [block, mat] : a[static_cast<std::size_t>(j)].parts)
        wajw[block] = nt[block].w * mat * nt[block].w;
      for (Index i = 0; i < m; ++i)
        schur(i, j) = dot(a[static_cast<std::size_t>(i)], wajw);
    }
    schur = 0.5 * (schur + schur.transpose()).eval();
    Eigen::LLT<Mat> chol(schur);
    Eigen::LDLT<Mat> ldlt;
    const bool use_llt = chol.info() == Eigen::Success;
    if (!use_llt) {
      Mat reg = schur;
      reg.diagonal().array() += 1e-13 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      ldlt.compute(reg);
    }
    auto solve_schur = [&](const Vec& rhs) -> Vec {
      auto once = [&](const Vec& v) { return use_llt ? Vec(chol.solve(v)) : Vec(ldlt.solve(v)); };
      // near degenerate optima the factorization is poor; a few refinement
      // rounds keep A(dX) close to the primal residual it should cancel
      Vec sol = once(rhs);
      for (int round = 0; round < 3; ++round) {
        const Vec res = rhs - schur * sol;
        if (!(res.norm() > 1e-15 * rhs.norm()))
          break;
        sol += once(res);
      }
      return sol;
    };

    const Blocks w_rd_w = wxw(rd);
    const Vec a_w_rd_w = apply_a(w_rd_w);

    // Direction for dX + W dZ W = kx.
    auto direction = [&](const Blocks& kx, Blocks& dx, Vec& dy, Blocks& dz) {
      dy = solve_schur(rp - apply_a(kx) + a_w_rd_w);
      dz = rd;
      axpy(dz, -1.0, apply_at(dy));
      dx = kx;
      axpy(dx, -1.0, wxw(dz));
      dx = symmetrized(std::move(dx));
      dz = symmetrized(std::move(dz));
    };

    // predictor
    Blocks kx_aff = x;
    for (auto& mtx : kx_aff)
      mtx = -mtx;
    Blocks dx_a, dz_a;
    Vec dy_a;
    direction(kx_aff, dx_a, dy_a, dz_a);
    const double ap_a = std::min(1.0, max_step(x, dx_a));
    const double ad_a = std::min(1.0, max_step(z, dz_a));
    Blocks x_a = x, z_a = z;
    axpy(x_a, ap_a, dx_a);
    axpy(z_a, ad_a, dz_a);
    const double mu_aff = dot(x_a, z_a) / static_cast<double>(total);
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // corrector in the scaled space: (D K + K D)/2 = sigma mu I - D^2 - sym(dX~ dZ~)
    Blocks kx(sides.size());
    for (std::size_t k = 0; k < sides.size(); ++k) {
      const auto& s = nt[k];
      const Mat dxt = s.ginv * dx_a[k] * s.ginv.transpose();
      const Mat dzt = s.g.transpose() * dz_a[k] * s.g;
      Mat rc = -0.5 * (dxt * dzt + dzt * dxt);
      for (Index i = 0; i < rc.rows(); ++i)
        rc(i, i) += sigma * mu - s.d(i) * s.d(i);
      Mat kk(rc.rows(), rc.cols());
      for (Index i = 0; i < rc.rows(); ++i)
        for (Index j = 0; j < rc.cols(); ++j)
          kk(i, j) = 2.0 * rc(i, j) / (s.d(i) + s.d(j));
      kx[k] = s.g * kk * s.g.transpose();
    }
    Blocks dx, dz;
    Vec dy;
    direction(kx, dx, dy, dz);

    const double tau = std::min(opts.step_fraction, 0.9 + 0.09 * std::min(ap_a, ad_a));
    const double ap = std::min(1.0, tau * max_step(x, dx));
    const double ad = std::min(1.0, tau * max_step(z, dz));
    sol.history.back().step_primal = ap;
    sol.history.back().step_dual = ad;
    stalled = (ap < 1e-8 && ad < 1e-8) ? stalled + 1 : 0;

    axpy(x, ap, dx);
    y += ad * dy;
    axpy(z, ad, dz);
    x = symmetrized(std::move(x));
    z = symmetrized(std::move(z));
  }
}

// ---------------------------------------------------------------------------

std::size_t HermitianSdp::add_block(Index n)
{
  if (n < 1)
    throw std::invalid_argument("HermitianSdp: block side must be >= 1");
  sides_.push_back(n);
  problem_.blocks.push_back(2 * n);
  return sides_.size() - 1;
}

void HermitianSdp::append_terms(std::vector<SdpEntry>& out, std::size_t block,
                                const ComplexMatrix& h) const
{
  if (block >= sides_.size())
    throw std::invalid_argument("HermitianSdp: unknown block");
  const Index n = sides_[block];
  if (h.rows() != n || h.cols() != n)
    throw std::invalid_argument("HermitianSdp: coefficient has the wrong size");
  for (Index q = 0; q < n; ++q)
    for (Index p = 0; p < n; ++p) {
      const Complex v = h(p, q);
      if (v.real() != 0.0) {
        out.push_back({block, p, q, 0.5 * v.real()});
        out.push_back({block, p + n, q + n, 0.5 * v.real()});
      }
      if (v.imag() != 0.0) {
        out.push_back({block, p, q + n, -0.5 * v.imag()});
        out.push_back({block, p + n, q, 0.5 * v.imag()});
      }
    }
}

void HermitianSdp::add_objective(std::size_t block, const ComplexMatrix& h)
{
  append_terms(problem_.objective, block, h);
}

void HermitianSdp::add_constraint(const std::vector<std::pair<std::size_t, ComplexMatrix>>& terms,
                                  double rhs)
{
  SdpConstraint con;
  con.rhs = rhs;
  for (const auto& [block, h] : terms)
    append_terms(con.entries, block, h);
  problem_.constraints.push_back(std::move(con));
}

ComplexMatrix select_real(Index n, Index p, Index q)
{
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  if (p == q) {
    h(p, p) = 1.0;
  } else {
    h(q, p) = 0.5;
    h(p, q) = 0.5;
  }
  return h;
}

ComplexMatrix select_imag(Index n, Index p, Index q)
{
  // tr(H X) = (X_pq - X_qp) / 2i
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  h(q, p) = Complex(0.0, -0.5);
  h(p, q) = Complex(0.0, 0.5);
  return h;
}

void HermitianSdp::fix_principal_block(std::size_t block, Index offset, const ComplexMatrix& value)
{
  const Index n = sides_.at(block);
  const Index k = value.rows();
  if (offset < 0 || offset + k > n)
    throw std::invalid_argument("HermitianSdp: principal block out of range");
  for (Index q = 0; q < k; ++q)
    for (Index p = 0; p <= q; ++p) {
      add_constraint({{block, select_real(n, offset + p, offset + q)}}, value(p, q).real());
      if (p != q)
        add_constraint({{block, select_imag(n, offset + p, offset + q)}}, value(p, q).imag());
    }
}

ComplexMatrix HermitianSdp::value(const SdpSolution& sol, std::size_t block) const
{
  const Index n = sides_.at(block);
  const Mat& y = sol.primal.at(block);
  ComplexMatrix x(n, n);
  for (Index q = 0; q < n; ++q)
    for (Index p = 0; p < n; ++p)
      x(p, q) = Complex(0.5 * (y(p, q) + y(p + n, q + n)), 0.5 * (y(p + n, q) - y(p, q + n)));
  return hermitian_part(x);
}

}  // namespace recov
