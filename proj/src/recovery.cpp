#include "recov/recovery.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace recov {

Channel::Channel(ComplexMatrix choi, Index dim_in, DimVector out_dims)
    : choi_(std::move(choi)), dim_in_(dim_in), dim_out_(dim_product(out_dims)),
      out_dims_(std::move(out_dims))
{
  if (dim_in_ < 1)
    throw std::invalid_argument("Channel: input dimension must be >= 1");
  if (choi_.rows() != dim_in_ * dim_out_ || choi_.cols() != dim_in_ * dim_out_)
    throw std::invalid_argument("Channel: Choi matrix size does not match dimensions");
  if (!all_finite(choi_))
    throw std::domain_error("Channel: non-finite Choi matrix");
}

ComplexMatrix Channel::operator()(const ComplexMatrix& x) const
{
  if (x.rows() != dim_in_ || x.cols() != dim_in_)
    throw std::invalid_argument("Channel: input operator has the wrong size");
  ComplexMatrix out = ComplexMatrix::Zero(dim_out_, dim_out_);
  for (Index i = 0; i < dim_in_; ++i)
    for (Index j = 0; j < dim_in_; ++j)
      if (x(i, j) != Complex(0.0))
        out += x(i, j) * block(i, j);
  return out;
}

Channel channel_from_kraus(const std::vector<ComplexMatrix>& kraus, DimVector out_dims)
{
  if (kraus.empty())
    throw std::invalid_argument("channel_from_kraus: empty Kraus list");
  const Index din = kraus.front().cols();
  const Index dout = kraus.front().rows();
  if (out_dims.empty())
    out_dims = {dout};
  if (dim_product(out_dims) != dout)
    throw std::invalid_argument("channel_from_kraus: out_dims do not match Kraus operators");
  ComplexMatrix completeness = ComplexMatrix::Zero(din, din);
  for (const auto& k : kraus) {
    if (k.cols() != din || k.rows() != dout)
      throw std::invalid_argument("channel_from_kraus: Kraus operators differ in shape");
    completeness += k.adjoint() * k;
  }
  if ((completeness - ComplexMatrix::Identity(din, din)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("channel_from_kraus: sum K^dagger K != id");

  // (id (x) K)|Omega> for |Omega> = sum_i |i>|i> is the vectorization of K^T
  ComplexMatrix choi = ComplexMatrix::Zero(din * dout, din * dout);
  for (const auto& k : kraus) {
    ComplexVector v(din * dout);
    for (Index i = 0; i < din; ++i)
      v.segment(i * dout, dout) = k.col(i);
    choi += v * v.adjoint();
  }
  return Channel(std::move(choi), din, std::move(out_dims));
}

Channel identity_channel(Index dim)
{
  return channel_from_kraus({ComplexMatrix::Identity(dim, dim)});
}

ComplexMatrix apply_to_operator(const Channel& chan, const ComplexMatrix& m, const DimVector& dims,
                                std::size_t target)
{
  if (target >= dims.size())
    throw std::invalid_argument("apply: target subsystem out of range");
  if (dims[target] != chan.dim_in())
    throw std::invalid_argument("apply: channel input dimension does not match the target");
  const std::size_t n = dims.size();

  std::vector<std::size_t> to_last;
  for (std::size_t k = 0; k < n; ++k)
    if (k != target)
      to_last.push_back(k);
  to_last.push_back(target);
  const ComplexMatrix moved = permute_subsystems(m, dims, to_last);

  const Index din = chan.dim_in();
  const Index dout = chan.dim_out();
  const Index drest = m.rows() / din;
  ComplexMatrix out = ComplexMatrix::Zero(drest * dout, drest * dout);
  for (Index i = 0; i < din; ++i)
    for (Index j = 0; j < din; ++j) {
      ComplexMatrix sub(drest, drest);
      for (Index r = 0; r < drest; ++r)
        for (Index c = 0; c < drest; ++c)
          sub(r, c) = moved(r * din + i, c * din + j);
      if (sub.cwiseAbs().maxCoeff() == 0.0)
        continue;
      out += tensor(sub, chan.block(i, j));
    }

  DimVector out_dims;
  for (std::size_t k = 0; k < n; ++k)
    if (k != target)
      out_dims.push_back(dims[k]);
  const std::size_t q = chan.out_dims().size();
  out_dims.insert(out_dims.end(), chan.out_dims().begin(), chan.out_dims().end());

  // rest factors sit at 0..n-2, output factors at n-1..n-2+q
  std::vector<std::size_t> back;
  for (std::size_t p = 0; p < n - 1 + q; ++p) {
    if (p < target)
      back.push_back(p);
    else if (p < target + q)
      back.push_back(n - 1 + (p - target));
    else
      back.push_back(p - q);
  }
  return permute_subsystems(out, out_dims, back);
}

DensityMatrix apply(const Channel& chan, const DensityMatrix& rho, std::size_t target)
{
  const ComplexMatrix out = apply_to_operator(chan, rho.matrix(), rho.dims(), target);
  DimVector dims(rho.dims().begin(), rho.dims().begin() + static_cast<std::ptrdiff_t>(target));
  dims.insert(dims.end(), chan.out_dims().begin(), chan.out_dims().end());
  dims.insert(dims.end(), rho.dims().begin() + static_cast<std::ptrdiff_t>(target) + 1,
              rho.dims().end());
  return new_density(out, dims);
}

namespace {

void require_bipartite(const DensityMatrix& rho_bc, const char* what)
{
  if (rho_bc.num_subsystems() != 2)
    throw std::invalid_argument(std::string(what) + ": expected a B(x)C state");
}

// X -> L (K X K^dagger (x) id_C) L^dagger + tr((1 - P_B) X) rho_BC
Channel sandwich_channel(const DensityMatrix& rho_bc, const ComplexMatrix& left_bc,
                         const ComplexMatrix& left_b, const ComplexMatrix& proj_b)
{
  const Index db = rho_bc.dims()[0];
  const Index dc = rho_bc.dims()[1];
  const ComplexMatrix id_c = ComplexMatrix::Identity(dc, dc);
  const ComplexMatrix off_support = ComplexMatrix::Identity(db, db) - proj_b;
  auto map = [&](const ComplexMatrix& x) -> ComplexMatrix {
    const ComplexMatrix inner = left_b * x * left_b.adjoint();
    ComplexMatrix out = left_bc * tensor(inner, id_c) * left_bc.adjoint();
    out += (off_support * x).trace() * rho_bc.matrix();
    return out;
  };
  return Channel(choi_of(map, db, db * dc), db, rho_bc.dims());
}

}  // namespace

Channel petz_transpose(const DensityMatrix& rho_bc)
{
  require_bipartite(rho_bc, "petz_transpose");
  const auto sb = herm_eig(partial_trace(rho_bc.matrix(), rho_bc.dims(), {0}));
  const ComplexMatrix inv_sqrt_b =
      matrix_func_on_support(sb, [](double x) { return 1.0 / std::sqrt(x); });
  return sandwich_channel(rho_bc, sqrt_psd(herm_eig(rho_bc.matrix())), inv_sqrt_b,
                          support_projector(sb));
}

Channel rotated_petz(const DensityMatrix& rho_bc, double t)
{
  require_bipartite(rho_bc, "rotated_petz");
  const auto sb = herm_eig(partial_trace(rho_bc.matrix(), rho_bc.dims(), {0}));
  const auto sbc = herm_eig(rho_bc.matrix());
  const ComplexMatrix left_bc = power_on_support(sbc, Complex(0.5, t));
  const ComplexMatrix left_b = power_on_support(sb, Complex(-0.5, -t));
  return sandwich_channel(rho_bc, left_bc, left_b, support_projector(sb));
}

AveragingScheme AveragingScheme::grid(int count, double halfwidth, Weights w)
{
  if (count < 1)
    throw std::invalid_argument("AveragingScheme: need at least one node");
  if (!(halfwidth >= 0.0))
    throw std::invalid_argument("AveragingScheme: negative half-width");
  AveragingScheme scheme;
  double total = 0.0;
  for (int k = 0; k < count; ++k) {
    const double s =
        count == 1 ? 0.0 : -halfwidth + 2.0 * halfwidth * k / static_cast<double>(count - 1);
    const double weight = w == Weights::kUniform
                              ? 1.0
                              : (std::numbers::pi / 2.0) / (std::cosh(std::numbers::pi * s) + 1.0);
    scheme.nodes.push_back(s / 2.0);
    scheme.weights.push_back(weight);
    total += weight;
  }
  for (double& x : scheme.weights)
    x /= total;
  return scheme;
}

void AveragingScheme::validate() const
{
  if (nodes.empty() || nodes.size() != weights.size())
    throw std::invalid_argument("AveragingScheme: nodes and weights must be non-empty and aligned");
  double total = 0.0;
  for (double x : weights) {
    if (!(x >= 0.0))
      throw std::invalid_argument("AveragingScheme: negative weight");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("AveragingScheme: weights do not sum to 1");
}

Channel averaged_rotated_petz(const DensityMatrix& rho_bc, const AveragingScheme& scheme)
{
  scheme.validate();
  require_bipartite(rho_bc, "averaged_rotated_petz");
  ComplexMatrix choi;
  for (std::size_t k = 0; k < scheme.nodes.size(); ++k) {
    const Channel r = rotated_petz(rho_bc, scheme.nodes[k]);
    if (k == 0)
      choi = scheme.weights[k] * r.choi();
    else
      choi += scheme.weights[k] * r.choi();
  }
  const Index db = rho_bc.dims()[0];
  return Channel(std::move(choi), db, rho_bc.dims());
}

TpcpReport validate_tpcp(const Channel& chan, double tol)
{
  TpcpReport r;
  const auto s = herm_eig(chan.choi());
  r.min_choi_eigenvalue = s.values(s.size() - 1);
  const ComplexMatrix tr_out = partial_trace(chan.choi(), {chan.dim_in(), chan.dim_out()}, {0});
  r.tp_error = (tr_out - ComplexMatrix::Identity(chan.dim_in(), chan.dim_in())).norm();
  r.completely_positive = r.min_choi_eigenvalue >= -tol;
  r.trace_preserving = r.tp_error <= tol;
  return r;
}

ComplexMatrix recovered_state(const DensityMatrix& rho, const TripartiteLabels& labels,
                              const Channel& chan)
{
  labels.validate(rho.num_subsystems());
  if (labels.b.size() != 1 || labels.c.size() != 1)
    throw std::invalid_argument("recovered_state: B and C must be single subsystems");
  const std::size_t b = labels.b.front();
  const std::size_t c = labels.c.front();
  if (chan.dim_in() != rho.dims()[b] || chan.out_dims() != DimVector{rho.dims()[b], rho.dims()[c]})
    throw std::invalid_argument("recovered_state: channel dimensions do not match B -> BC");

  const auto ab = labels.ab();
  DimVector ab_dims;
  std::size_t b_pos = 0;
  std::vector<std::size_t> emitted;  // original labels in output order
  for (std::size_t k = 0; k < ab.size(); ++k) {
    ab_dims.push_back(rho.dims()[ab[k]]);
    if (ab[k] == b) {
      b_pos = k;
      emitted.push_back(b);
      emitted.push_back(c);
    } else {
      emitted.push_back(ab[k]);
    }
  }
  const ComplexMatrix rho_ab = partial_trace(rho.matrix(), rho.dims(), ab);
  const ComplexMatrix out = apply_to_operator(chan, rho_ab, ab_dims, b_pos);

  DimVector out_dims;
  for (std::size_t k : emitted)
    out_dims.push_back(rho.dims()[k]);
  std::vector<std::size_t> perm(emitted.size());
  for (std::size_t p = 0; p < emitted.size(); ++p)
    perm[emitted[p]] = p;
  return permute_subsystems(out, out_dims, perm);
}

RecoveryReport report_from_fidelity(double cmi_bits, double fid)
{
  RecoveryReport r;
  r.cmi_bits = cmi_bits;
  r.fid = fid;
  r.neg2logF = fid > 0.0 ? -2.0 * std::log2(fid) : kInfinity;
  r.delta_thm1 = cmi_bits - r.neg2logF;
  r.delta_cor3 = fid - 1.0 + (std::numbers::ln2 / 2.0) * cmi_bits;
  return r;
}

RecoveryReport recovery_report(const DensityMatrix& rho, const TripartiteLabels& labels,
                               const Channel& chan, bool with_dm)
{
  const ComplexMatrix recovered = recovered_state(rho, labels, chan);
  const double i_bits = cmi(rho, labels).cmi;
  RecoveryReport r = report_from_fidelity(i_bits, fidelity(rho.matrix(), recovered));
  if (with_dm) {
    r.dm_bits = measured_relative_entropy(rho, hermitian_part(recovered));
    r.delta_meas = i_bits - *r.dm_bits;
  }
  return r;
}

Channel appendix_f_recovery_map()
{
  auto ket_bra = [](Index out, Index in) {
    ComplexMatrix k = ComplexMatrix::Zero(4, 2);
    k(out, in) = 1.0;
    return k;
  };
  const double third = 1.0 / std::sqrt(3.0);
  return channel_from_kraus(
      {ket_bra(0, 0), third * ket_bra(1, 1), third * ket_bra(2, 1), third * ket_bra(3, 1)}, {2, 2});
}

ComplexMatrix unital_inner_map(const Channel& chan, const DensityMatrix& rho_bc,
                               const ComplexMatrix& y_b)
{
  require_bipartite(rho_bc, "unital_inner_map");
  const auto sb = herm_eig(partial_trace(rho_bc.matrix(), rho_bc.dims(), {0}));
  const ComplexMatrix sqrt_b = sqrt_psd(sb);
  const ComplexMatrix inv_sqrt_bc =
      matrix_func_on_support(herm_eig(rho_bc.matrix()), [](double x) { return 1.0 / std::sqrt(x); });
  return inv_sqrt_bc * chan(sqrt_b * y_b * sqrt_b) * inv_sqrt_bc;
}

}  // namespace recov
