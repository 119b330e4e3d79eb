#include "recov/recovery_sdp.hpp"

#include <cmath>

namespace recov {

namespace {

using Terms = std::vector<std::pair<std::size_t, ComplexMatrix>>;

// Orthonormal basis of the support, as columns.
ComplexMatrix support_basis(const Spectrum<double>& s)
{
  return s.vectors.leftCols(support_rank(s));
}

// -Re tr X for the off-diagonal block of a (p + q)-sided variable, where the
// physical X is left * X' * right^dagger and k = right^dagger left.
ComplexMatrix negative_real_trace(Index p, Index q, const ComplexMatrix& k)
{
  ComplexMatrix h = ComplexMatrix::Zero(p + q, p + q);
  h.block(0, p, p, q) = -0.5 * k.adjoint();
  h.block(p, 0, q, p) = -0.5 * k;
  return h;
}

// Re tr(K J) and Im tr(K J) as tr(H J) with H Hermitian (J Hermitian).
ComplexMatrix real_part_coefficient(const ComplexMatrix& k)
{
  return 0.5 * (k + k.adjoint());
}

ComplexMatrix imag_part_coefficient(const ComplexMatrix& k)
{
  return Complex(0.0, -0.5) * (k - k.adjoint());
}

// Z_Q[p, q] = L(J)[p, q] for a complex-linear matrix-valued L given on the basis
// (values[a * n + b] = L(|a><b|)).
void link_block_to_map(HermitianSdp& sdp, std::size_t z_block, Index side, Index offset,
                       std::size_t j_block, Index n, const std::vector<ComplexMatrix>& values)
{
  const Index r = values.front().rows();
  for (Index q = 0; q < r; ++q)
    for (Index p = 0; p <= q; ++p) {
      ComplexMatrix k(n, n);
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b)
          k(b, a) = values[static_cast<std::size_t>(a * n + b)](p, q);
      sdp.add_constraint({{z_block, select_real(side, offset + p, offset + q)},
                          {j_block, -real_part_coefficient(k)}},
                         0.0);
      if (p != q)
        sdp.add_constraint({{z_block, select_imag(side, offset + p, offset + q)},
                            {j_block, -imag_part_coefficient(k)}},
                           0.0);
    }
}

// tr_out J = id (in = true) or tr_in J = id (in = false) for J on in (x) out.
void add_identity_marginal(HermitianSdp& sdp, std::size_t j_block, Index din, Index dout,
                           bool trace_out)
{
  const Index d = trace_out ? din : dout;
  for (Index q = 0; q < d; ++q)
    for (Index p = 0; p <= q; ++p) {
      auto lift = [&](const ComplexMatrix& h) -> ComplexMatrix {
        return trace_out ? tensor(h, identity<double>(dout)) : tensor(identity<double>(din), h);
      };
      sdp.add_constraint({{j_block, lift(select_real(d, p, q))}}, p == q ? 1.0 : 0.0);
      if (p != q)
        sdp.add_constraint({{j_block, lift(select_imag(d, p, q))}}, 0.0);
    }
}

SdpSolution solve_or_throw(const HermitianSdp& sdp, const SdpOptions& opts, const char* what)
{
  SdpSolution sol = solve_sdp(sdp.problem(), opts);
  if (sol.status != SdpStatus::kOptimal)
    throw SdpFailure(what, sol.status);
  return sol;
}

struct RecoverySetup {
  std::size_t b = 0;
  std::size_t c = 0;
  Index db = 0;
  Index dc = 0;
  ComplexMatrix v;        // support basis of rho
  ComplexMatrix rho_red;  // V^dagger rho V
};

RecoverySetup setup(const DensityMatrix& rho, const TripartiteLabels& labels, const char* what)
{
  labels.validate(rho.num_subsystems());
  if (labels.b.size() != 1 || labels.c.size() != 1)
    throw std::invalid_argument(std::string(what) + ": B and C must be single subsystems");
  RecoverySetup s;
  s.b = labels.b.front();
  s.c = labels.c.front();
  s.db = rho.dims()[s.b];
  s.dc = rho.dims()[s.c];
  s.v = support_basis(rho.spectrum());
  s.rho_red = hermitian_part(s.v.adjoint() * rho.matrix() * s.v);
  return s;
}

// V^dagger R(rho_AB) V for the map R with Choi matrix `choi`.
ComplexMatrix compressed_recovery(const DensityMatrix& rho, const TripartiteLabels& labels,
                                  const RecoverySetup& s, const ComplexMatrix& choi)
{
  const Channel chan(choi, s.db, {s.db, s.dc});
  return s.v.adjoint() * recovered_state(rho, labels, chan) * s.v;
}

}  // namespace

ComplexMatrix project_to_tpcp(const ComplexMatrix& choi, Index dim_in, Index dim_out)
{
  auto spec = herm_eig(choi);
  spec.values = spec.values.cwiseMax(0.0);
  const ComplexMatrix clamped = spec.reconstruct();
  const ComplexMatrix t = partial_trace(clamped, {dim_in, dim_out}, {0});
  const ComplexMatrix t_inv_sqrt =
      matrix_func_on_support(herm_eig(t), [](double x) { return 1.0 / std::sqrt(x); });
  const ComplexMatrix s = tensor(t_inv_sqrt, identity<double>(dim_out));
  return hermitian_part(s * clamped * s);
}

double fidelity_sdp(const DensityMatrix& rho, const DensityMatrix& sigma, const SdpOptions& opts)
{
  if (rho.dims() != sigma.dims())
    throw std::invalid_argument("fidelity_sdp: states have different dimensions");
  const ComplexMatrix vr = support_basis(rho.spectrum());
  const ComplexMatrix vs = support_basis(sigma.spectrum());
  const Index p = vr.cols();
  const Index q = vs.cols();

  HermitianSdp sdp;
  const auto z = sdp.add_block(p + q);
  sdp.add_objective(z, negative_real_trace(p, q, vs.adjoint() * vr));
  sdp.fix_principal_block(z, 0, hermitian_part(vr.adjoint() * rho.matrix() * vr));
  sdp.fix_principal_block(z, p, hermitian_part(vs.adjoint() * sigma.matrix() * vs));
  const SdpSolution sol = solve_or_throw(sdp, opts, "fidelity_sdp");
  return -sol.primal_objective;
}

RecoveryOptimum fidelity_of_recovery(const DensityMatrix& rho, const TripartiteLabels& labels,
                                     const SdpOptions& opts)
{
  const RecoverySetup s = setup(rho, labels, "fidelity_of_recovery");
  const Index dout = s.db * s.dc;
  const Index nj = s.db * dout;
  if (s.db * s.db * s.dc > 128)
    throw std::invalid_argument("fidelity_of_recovery: d_B^2 d_C must be <= 128");
  const Index r = s.v.cols();

  HermitianSdp sdp;
  const auto z = sdp.add_block(2 * r);
  const auto j = sdp.add_block(nj);
  sdp.add_objective(z, negative_real_trace(r, r, ComplexMatrix::Identity(r, r)));
  sdp.fix_principal_block(z, 0, s.rho_red);

  std::vector<ComplexMatrix> values;
  for (Index a = 0; a < nj; ++a)
    for (Index b = 0; b < nj; ++b) {
      ComplexMatrix e = ComplexMatrix::Zero(nj, nj);
      e(a, b) = 1.0;
      values.push_back(compressed_recovery(rho, labels, s, e));
    }
  link_block_to_map(sdp, z, 2 * r, r, j, nj, values);
  add_identity_marginal(sdp, j, s.db, dout, true);

  SdpSolution sol = solve_or_throw(sdp, opts, "fidelity_of_recovery");
  Channel witness(project_to_tpcp(sdp.value(sol, j), s.db, dout), s.db, {s.db, s.dc});
  const double wf = fidelity(rho.matrix(), recovered_state(rho, labels, witness));
  return RecoveryOptimum{-sol.primal_objective, -sol.dual_objective, wf, std::move(witness),
                         sdp.problem(), std::move(sol)};
}

UnitalRecoveryOptimum fidelity_of_recovery_unital_form(const DensityMatrix& rho,
                                                       const TripartiteLabels& labels,
                                                       const SdpOptions& opts)
{
  const RecoverySetup s = setup(rho, labels, "fidelity_of_recovery_unital_form");
  const Index dbc = s.db * s.dc;
  const Index nu = dbc * dbc;
  if (nu > 128)
    throw std::invalid_argument("fidelity_of_recovery_unital_form: (d_B d_C)^2 must be <= 128");
  const Index r = s.v.cols();

  DimVector bc_dims{s.db, s.dc};
  std::vector<std::size_t> bc{s.b, s.c};
  if (s.c < s.b)
    bc_dims = {s.dc, s.db};
  ComplexMatrix rho_bc_m = partial_trace(rho.matrix(), rho.dims(), bc);
  if (s.c < s.b)
    rho_bc_m = permute_subsystems(rho_bc_m, bc_dims, {1, 0});
  const DensityMatrix rho_bc = new_density(rho_bc_m, {s.db, s.dc});
  const auto sb = herm_eig(partial_trace(rho_bc.matrix(), rho_bc.dims(), {0}));
  const ComplexMatrix inv_sqrt_b =
      matrix_func_on_support(sb, [](double x) { return 1.0 / std::sqrt(x); });
  const ComplexMatrix sqrt_bc = sqrt_psd(herm_eig(rho_bc.matrix()));
  const ComplexMatrix off_support = ComplexMatrix::Identity(s.db, s.db) - support_projector(sb);
  const ComplexMatrix id_c = identity<double>(s.dc);

  // Choi of R for the inner map with Choi u (u need not be PSD).
  auto outer_choi = [&](const ComplexMatrix& u, bool complete) {
    const Channel inner(u, dbc, {s.db, s.dc});
    auto map = [&](const ComplexMatrix& x) -> ComplexMatrix {
      ComplexMatrix out = sqrt_bc * inner(tensor(inv_sqrt_b * x * inv_sqrt_b, id_c)) * sqrt_bc;
      if (complete)
        out += (off_support * x).trace() * rho_bc.matrix();
      return out;
    };
    return choi_of(map, s.db, dbc);
  };

  HermitianSdp sdp;
  const auto z = sdp.add_block(2 * r);
  const auto j = sdp.add_block(nu);
  sdp.add_objective(z, negative_real_trace(r, r, ComplexMatrix::Identity(r, r)));
  sdp.fix_principal_block(z, 0, s.rho_red);

  std::vector<ComplexMatrix> values;
  std::vector<ComplexMatrix> outer;
  for (Index a = 0; a < nu; ++a)
    for (Index b = 0; b < nu; ++b) {
      ComplexMatrix e = ComplexMatrix::Zero(nu, nu);
      e(a, b) = 1.0;
      outer.push_back(outer_choi(e, false));
      values.push_back(compressed_recovery(rho, labels, s, outer.back()));
    }
  link_block_to_map(sdp, z, 2 * r, r, j, nu, values);
  add_identity_marginal(sdp, j, dbc, dbc, true);
  add_identity_marginal(sdp, j, dbc, dbc, false);

  // tr R(|v_p><v_q|) = delta_pq on supp(rho_B)
  const ComplexMatrix vb = support_basis(sb);
  for (Index q = 0; q < vb.cols(); ++q)
    for (Index p = 0; p <= q; ++p) {
      const ComplexMatrix x = vb.col(p) * vb.col(q).adjoint();
      ComplexMatrix k(nu, nu);
      for (Index a = 0; a < nu; ++a)
        for (Index b = 0; b < nu; ++b) {
          const Channel rmap(outer[static_cast<std::size_t>(a * nu + b)], s.db, {s.db, s.dc});
          k(b, a) = rmap(x).trace();
        }
      sdp.add_constraint({{j, real_part_coefficient(k)}}, p == q ? 1.0 : 0.0);
      if (p != q)
        sdp.add_constraint({{j, imag_part_coefficient(k)}}, 0.0);
    }

  SdpSolution sol = solve_or_throw(sdp, opts, "fidelity_of_recovery_unital_form");
  const ComplexMatrix u = project_to_tpcp(sdp.value(sol, j), dbc, dbc);
  Channel witness(project_to_tpcp(outer_choi(u, true), s.db, dbc), s.db, {s.db, s.dc});
  const double wf = fidelity(rho.matrix(), recovered_state(rho, labels, witness));
  UnitalRecoveryOptimum out{{-sol.primal_objective, -sol.dual_objective, wf, std::move(witness),
                             sdp.problem(), std::move(sol)},
                            Channel(u, dbc, {s.db, s.dc})};
  return out;
}

}  // namespace recov
