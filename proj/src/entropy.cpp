#include "recov/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace recov {

namespace {

constexpr double kLn2 = std::numbers::ln2;
// Weight of rho outside supp(sigma) above which D(rho||sigma) is infinite.
constexpr double kSupportLeak = 1e-10;
// Outcome probabilities below this are rounding noise.
constexpr double kProbabilityFloor = 1e-14;

double xlog2x_sum(const RealVector& values)
{
  double h = 0.0;
  for (Index k = 0; k < values.size(); ++k) {
    const double l = values(k);
    if (l > 0.0)
      h -= l * std::log2(l);
  }
  return h;
}

// First divided difference of ln on (0, inf).
double log_dd1(double x, double y)
{
  if (x == y)
    return 1.0 / x;
  return std::log1p((x - y) / y) / (x - y);
}

// Second divided difference of ln (symmetric in its arguments).
double log_dd2(double x, double y, double z)
{
  double v[3] = {x, y, z};
  std::sort(v, v + 3);
  const double spread = v[2] - v[0];
  if (spread > 1e-5 * v[2])
    return (log_dd1(v[2], v[1]) - log_dd1(v[1], v[0])) / spread;
  const double m = (v[0] + v[1] + v[2]) / 3.0;
  return -0.5 / (m * m);
}

// Orthonormal basis of r x r Hermitian matrices under Re tr(A^dagger B).
struct HermitianBasis {
  explicit HermitianBasis(Index r) : r(r) {}

  Index r;
  Index size() const { return r * r; }

  // element a as (i, j, kind): kind 0 diagonal, 1 symmetric real, 2 imaginary
  void decode(Index a, Index& i, Index& j, int& kind) const
  {
    if (a < r) {
      i = j = a;
      kind = 0;
      return;
    }
    Index rest = a - r;
    const Index pair = rest / 2;
    kind = 1 + static_cast<int>(rest % 2);
    // pair -> (i < j) in row-major upper-triangular order
    i = 0;
    Index count = r - 1;
    Index p = pair;
    while (p >= count) {
      p -= count;
      ++i;
      --count;
    }
    j = i + 1 + p;
  }

  ComplexMatrix element(Index a) const
  {
    Index i, j;
    int kind;
    decode(a, i, j, kind);
    ComplexMatrix e = ComplexMatrix::Zero(r, r);
    const double s = 1.0 / std::sqrt(2.0);
    if (kind == 0) {
      e(i, i) = 1.0;
    } else if (kind == 1) {
      e(i, j) = s;
      e(j, i) = s;
    } else {
      e(i, j) = Complex(0.0, s);
      e(j, i) = Complex(0.0, -s);
    }
    return e;
  }

  // Re tr(E_a M) for Hermitian-ish M.
  double component(Index a, const ComplexMatrix& m) const
  {
    Index i, j;
    int kind;
    decode(a, i, j, kind);
    const double s = 1.0 / std::sqrt(2.0);
    if (kind == 0)
      return m(i, i).real();
    if (kind == 1)
      return s * (m(j, i) + m(i, j)).real();
    return (Complex(0.0, s) * m(j, i) + Complex(0.0, -s) * m(i, j)).real();
  }

  ComplexMatrix assemble(const RealVector& theta) const
  {
    ComplexMatrix h = ComplexMatrix::Zero(r, r);
    for (Index a = 0; a < size(); ++a)
      h += theta(a) * element(a);
    return h;
  }
};

struct VariationalObjective {
  const ComplexMatrix& rho;    // on supp(sigma)
  const ComplexMatrix& sigma;  // positive definite on supp(sigma)

  // f(omega) = tr(rho ln omega) + 1 - tr(sigma omega), nats; -inf off the cone
  double value(const ComplexMatrix& omega) const
  {
    const auto s = herm_eig(omega);
    if (!(s.values.minCoeff() > 0.0))
      return -kInfinity;
    const ComplexMatrix log_omega =
        s.vectors * s.values.array().log().matrix().cast<Complex>().asDiagonal() *
        s.vectors.adjoint();
    return (rho * log_omega).trace().real() + 1.0 - (sigma * omega).trace().real();
  }

  // omega scaled by the c > 0 maximizing f(c omega)
  ComplexMatrix rescaled(const ComplexMatrix& omega) const
  {
    const double c = rho.trace().real() / (sigma * omega).trace().real();
    return c * omega;
  }
};

}  // namespace

double von_neumann(const ComplexMatrix& psd)
{
  return xlog2x_sum(herm_eig(psd).values);
}

double von_neumann(const DensityMatrix& rho)
{
  return von_neumann(rho.matrix());
}

EntropyReport cmi(const DensityMatrix& rho, const TripartiteLabels& labels)
{
  labels.validate(rho.num_subsystems());
  EntropyReport r;
  r.h_abc = von_neumann(rho);
  r.h_ab = von_neumann(partial_trace(rho.matrix(), rho.dims(), labels.ab()));
  r.h_bc = von_neumann(partial_trace(rho.matrix(), rho.dims(), labels.bc()));
  r.h_b = von_neumann(partial_trace(rho.matrix(), rho.dims(), labels.b));
  r.cmi = r.h_ab + r.h_bc - r.h_b - r.h_abc;
  return r;
}

double relative_entropy(const DensityMatrix& rho, const ComplexMatrix& sigma)
{
  if (sigma.rows() != rho.size() || sigma.cols() != rho.size())
    throw std::invalid_argument("relative_entropy: size mismatch");
  const auto ss = herm_eig(sigma);
  const ComplexMatrix proj = support_projector(ss);
  const double leak = (rho.matrix() - proj * rho.matrix() * proj).trace().real();
  if (leak > kSupportLeak)
    return kInfinity;
  const ComplexMatrix log_sigma =
      matrix_func_on_support(ss, [](double x) { return std::log2(x); });
  const double cross = (rho.matrix() * log_sigma).trace().real();
  return -von_neumann(rho) - cross;
}

double classical_kl(const RealVector& p, const RealVector& q)
{
  if (p.size() != q.size())
    throw std::invalid_argument("classical_kl: size mismatch");
  double d = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    const double pk = p(k);
    if (pk <= kProbabilityFloor)
      continue;
    const double qk = q(k);
    if (qk <= 0.0)
      return kInfinity;
    d += pk * std::log2(pk / qk);
  }
  return d;
}

double measured_in_basis(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                         const ComplexMatrix& basis)
{
  const Index n = basis.cols();
  RealVector p(n), q(n);
  for (Index k = 0; k < n; ++k) {
    const auto v = basis.col(k);
    p(k) = std::max((v.adjoint() * rho * v)(0, 0).real(), 0.0);
    q(k) = std::max((v.adjoint() * sigma * v)(0, 0).real(), 0.0);
  }
  return classical_kl(p, q);
}

MeasuredRelEntResult measured_relative_entropy_detail(const DensityMatrix& rho,
                                                      const ComplexMatrix& sigma,
                                                      const MeasuredRelEntOptions& opts)
{
  if (sigma.rows() != rho.size() || sigma.cols() != rho.size())
    throw std::invalid_argument("measured_relative_entropy: size mismatch");
  MeasuredRelEntResult result;

  // Restrict both operators to supp(sigma); a measurement there extends to the
  // full space without changing outcome statistics.
  const auto ss = herm_eig(sigma);
  const Index r = support_rank(ss);
  const ComplexMatrix v = ss.vectors.leftCols(r);
  const ComplexMatrix proj = v * v.adjoint();
  const double leak = (rho.matrix() - proj * rho.matrix() * proj).trace().real();
  if (leak > kSupportLeak) {
    result.value = result.omega_value = result.basis_value = kInfinity;
    result.converged = true;
    return result;
  }
  const ComplexMatrix rho_s = hermitian_part(v.adjoint() * rho.matrix() * v);
  const ComplexMatrix sigma_s = ss.values.head(r).cast<Complex>().asDiagonal();

  const HermitianBasis basis(r);
  const VariationalObjective objective{rho_s, sigma_s};

  // Candidate starts: the identity and omega = M^2 with M the fidelity operator
  // sigma^-1/2 (sigma^1/2 rho sigma^1/2)^1/2 sigma^-1/2, which is optimal when
  // rho and sigma commute.
  const RealVector sig = ss.values.head(r);
  const ComplexMatrix sig_half = sig.cwiseSqrt().cast<Complex>().asDiagonal();
  const ComplexMatrix sig_inv_half = sig.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal();
  const ComplexMatrix mid = sqrt_psd(hermitian_part(sig_half * rho_s * sig_half));
  const ComplexMatrix m = sig_inv_half * mid * sig_inv_half;
  ComplexMatrix omega = objective.rescaled(ComplexMatrix::Identity(r, r));
  double g = objective.value(omega);
  {
    const ComplexMatrix m2 = hermitian_part(m * m);
    const double floor = 1e-9 * std::max(m2.trace().real(), 1.0);
    const ComplexMatrix start =
        objective.rescaled(m2 + floor * ComplexMatrix::Identity(r, r));
    const double gs = objective.value(start);
    if (gs > g) {
      omega = start;
      g = gs;
    }
  }

  const Index np = basis.size();
  std::vector<ComplexMatrix> elements;
  elements.reserve(np);
  for (Index a = 0; a < np; ++a)
    elements.push_back(basis.element(a));

  double decrement = kInfinity;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const auto so = herm_eig(omega);
    const ComplexMatrix& u = so.vectors;
    const RealVector& w = so.values;
    const ComplexMatrix rt = u.adjoint() * rho_s * u;

    ComplexMatrix gamma(r, r);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j)
        gamma(i, j) = log_dd1(w(i), w(j)) * rt(i, j);
    const ComplexMatrix grad_m = u * gamma * u.adjoint() - sigma_s;

    RealVector grad(np);
    for (Index a = 0; a < np; ++a)
      grad(a) = basis.component(a, grad_m);

    std::vector<double> dd2(static_cast<std::size_t>(r * r * r));
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j)
        for (Index k = 0; k < r; ++k)
          dd2[static_cast<std::size_t>((i * r + j) * r + k)] = log_dd2(w(i), w(j), w(k));
    auto f2 = [&](Index i, Index j, Index k) {
      return dd2[static_cast<std::size_t>((i * r + j) * r + k)];
    };

    // D^2 tr(rho ln omega)[A, B] = tr(B~ (X_A + Y_A)) in the eigenbasis of omega,
    // X_kj = sum_i f2(i,j,k) R~_ki A~_ij and Y_ji = sum_k f2(i,j,k) A~_jk R~_ki.
    // The second divided differences of ln are negative, so -D^2 is PSD.
    Eigen::MatrixXd neg_hess(np, np);
    for (Index a = 0; a < np; ++a) {
      const ComplexMatrix at = u.adjoint() * elements[a] * u;
      ComplexMatrix q = ComplexMatrix::Zero(r, r);
      for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < r; ++j)
          for (Index k = 0; k < r; ++k) {
            const double f = f2(i, j, k);
            q(k, j) -= f * rt(k, i) * at(i, j);
            q(j, i) -= f * at(j, k) * rt(k, i);
          }
      const ComplexMatrix qb = u * q * u.adjoint();
      for (Index b = 0; b < np; ++b)
        neg_hess(b, a) = basis.component(b, qb);
    }
    neg_hess = 0.5 * (neg_hess + neg_hess.transpose()).eval();
    // the optimum can sit on the boundary of the cone when rho is singular;
    // stop once omega's kernel eigenvalues have underflowed
    if (!grad.allFinite() || !neg_hess.allFinite())
      break;
    // rank-deficient rho leaves flat directions; a tiny ridge keeps the step defined
    neg_hess.diagonal().array() += 1e-14 * (1.0 + neg_hess.diagonal().cwiseAbs().maxCoeff());

    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_hess);
    RealVector step = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || grad.dot(step) <= 0.0)
      step = grad;
    decrement = grad.dot(step);
    if (0.5 * decrement / kLn2 <= 1e-3 * opts.tolerance)
      break;

    const ComplexMatrix dir = basis.assemble(step);
    // largest t keeping omega + t dir positive definite
    double t = 1.0;
    {
      const ComplexMatrix dt = u.adjoint() * dir * u;
      const RealVector winv = w.cwiseSqrt().cwiseInverse();
      const ComplexMatrix scaled = winv.cast<Complex>().asDiagonal() * dt *
                                   winv.cast<Complex>().asDiagonal();
      const double lo = herm_eig(hermitian_part(scaled)).values.minCoeff();
      if (lo < 0.0)
        t = std::min(1.0, 0.99 / -lo);
    }
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const ComplexMatrix trial = hermitian_part(omega + t * dir);
      const double gt = objective.value(trial);
      if (std::isfinite(gt) && gt >= g + 0.25 * t * decrement) {
        omega = trial;
        g = gt;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved)
      break;
  }

  result.iterations = it;
  result.decrement = 0.5 * decrement / kLn2;
  result.converged = result.decrement <= opts.tolerance;
  result.omega_value = g / kLn2;
  result.basis_value = measured_in_basis(rho_s, sigma_s, herm_eig(omega).vectors);
  result.value = std::max(result.omega_value, result.basis_value);
  return result;
}

double measured_rel_ent_lower(const DensityMatrix& rho, const ComplexMatrix& sigma,
                              int n_samples, std::uint64_t seed)
{
  if (sigma.rows() != rho.size() || sigma.cols() != rho.size())
    throw std::invalid_argument("measured_rel_ent_lower: size mismatch");
  double best = std::max(measured_in_basis(rho.matrix(), sigma, herm_eig(rho.matrix()).vectors),
                         measured_in_basis(rho.matrix(), sigma, herm_eig(sigma).vectors));
  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s)
    best = std::max(best, measured_in_basis(rho.matrix(), sigma, haar_unitary(rho.size(), rng)));
  return best;
}

}  // namespace recov
