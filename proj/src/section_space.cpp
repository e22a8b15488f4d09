#include "berezin/section_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "berezin/linalg.hpp"
#include "berezin/parallel.hpp"

namespace berezin {

int SectionModel::dim() const {
  int n = 0;
  for (int a : degrees) n += p + a + 1;
  return n;
}

int SectionModel::block_offset(int i) const {
  int o = 0;
  for (int k = 0; k < i; ++k) o += block_size(k);
  return o;
}

Eigen::MatrixXcd SectionModel::evaluation(ChartPoint z) const {
  const int r = rank();
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(r, dim());
  int off = 0;
  for (int i = 0; i < r; ++i) {
    cplx zj = 1.0;
    for (int j = 0; j < block_size(i); ++j) {
      V(i, off + j) = zj;
      zj *= z;
    }
    off += block_size(i);
  }
  return V;
}

std::vector<int> SectionModel::charges() const {
  std::vector<int> c;
  for (int i = 0; i < rank(); ++i)
    for (int j = 0; j < block_size(i); ++j) c.push_back(j);
  return c;
}

Eigen::MatrixXcd model_gram(const SectionModel& m, const QuadratureRule& rule) {
  const int N = m.dim();
  // per-chunk partial sums combined in index order
  constexpr std::size_t kChunk = 64;
  const std::size_t nchunks = (rule.size() + kChunk - 1) / kChunk;
  std::vector<Eigen::MatrixXcd> part(nchunks);
  parallel_for(nchunks, [&](std::size_t c) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(N, N);
    const std::size_t hi = std::min(rule.size(), (c + 1) * kChunk);
    for (std::size_t n = c * kChunk; n < hi; ++n) {
      const ChartPoint z = rule.nodes[n];
      const Eigen::MatrixXcd V = m.evaluation(z);
      const double w = rule.weights[n] * m.density(z);
      acc.noalias() += w * (V.adjoint() * (m.fiber_metric(z) * V));
    }
    part[c] = std::move(acc);
  });
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(N, N);
  for (auto& P : part) G += P;
  return 0.5 * (G + G.adjoint());
}

QuadratureRule choose_rule(const SectionModel& m, const QuadratureRule* base) {
  if (m.polynomial && !base) return make_quadrature(std::max(m.exact_m, m.exact_d + 2), m.exact_d);
  QuadratureRule rule = base ? *base : make_quadrature(std::max(m.exact_m, m.exact_d + 2), m.exact_d);
  Eigen::MatrixXcd G = model_gram(m, rule);
  for (int k = 0; k < 6; ++k) {
    QuadratureRule finer = rule.refined();
    Eigen::MatrixXcd G2 = model_gram(m, finer);
    const double rel = (G2 - G).norm() / G2.norm();
    if (rel < 1e-10) return finer;
    rule = std::move(finer);
    G = std::move(G2);
  }
  throw NumericalError("quadrature refinement did not stabilize the Gram matrix after 6 doublings");
}

SectionSpace::SectionSpace(SectionModel model) : SectionSpace(model, choose_rule(model)) {}

SectionSpace::SectionSpace(SectionModel model, QuadratureRule rule)
    : model_(std::move(model)), rule_(std::move(rule)) {
  if (model_.rank() < 1) throw ValidationError("bundle needs at least one summand");
  for (int a : model_.degrees)
    if (model_.p + a < 0) throw ValidationError("level too small: p + a_i must be nonnegative");
  gram_ = ProdMatrix(model_gram(model_, rule_));
  C_ = orthonormal_basis(gram_.matrix());
  if (model_.polynomial)
    op_rule_ = make_quadrature(2 * std::max(model_.exact_m, model_.exact_d + 2), 2 * model_.exact_d);
  else
    op_rule_ = rule_.refined();
  nodes_.resize(rule_.size());
  std::vector<double> dens(rule_.size());
  parallel_for(rule_.size(), [&](std::size_t n) {
    const ChartPoint z = rule_.nodes[n];
    dens[n] = rule_.weights[n] * model_.density(z);
    nodes_[n] = node_data(z, dens[n]);
  });
  mass_ = pairwise_sum(dens);
}

SectionSpace::NodeData SectionSpace::node_data(ChartPoint z, double w) const {
  NodeData d;
  d.z = z;
  d.weight = w;
  d.R = fiber_frame(z);
  d.Rinv = d.R.inverse();
  d.ev = d.R * model_.evaluation(z) * C_;
  return d;
}

Eigen::MatrixXcd SectionSpace::fiber_frame(ChartPoint z) const {
  const Eigen::MatrixXcd W = model_.fiber_metric(z);
  Eigen::LLT<Eigen::MatrixXcd> llt(0.5 * (W + W.adjoint()));
  if (llt.info() != Eigen::Success) throw NumericalError("fiber metric not positive definite");
  return llt.matrixU();
}

Eigen::MatrixXcd SectionSpace::ev(ChartPoint z) const {
  return fiber_frame(z) * model_.evaluation(z) * C_;
}

Eigen::MatrixXcd SectionSpace::rawnsley(ChartPoint z) const {
  const Eigen::MatrixXcd e = ev(z);
  const Eigen::MatrixXcd r = e * e.adjoint();
  return 0.5 * (r + r.adjoint());
}

Eigen::MatrixXcd SectionSpace::toeplitz(const std::function<Eigen::MatrixXcd(ChartPoint)>& F) const {
  const int N = dim();
  constexpr std::size_t kChunk = 64;
  const std::size_t nchunks = (nodes_.size() + kChunk - 1) / kChunk;
  std::vector<Eigen::MatrixXcd> part(nchunks);
  parallel_for(nchunks, [&](std::size_t c) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(N, N);
    const std::size_t hi = std::min(nodes_.size(), (c + 1) * kChunk);
    for (std::size_t n = c * kChunk; n < hi; ++n) {
      const NodeData& d = nodes_[n];
      const Eigen::MatrixXcd Fon = d.R * F(d.z) * d.Rinv;
      acc.noalias() += d.weight * (d.ev.adjoint() * (Fon * d.ev));
    }
    part[c] = std::move(acc);
  });
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(N, N);
  for (auto& P : part) T += P;
  return T;
}

Eigen::MatrixXcd SectionSpace::toeplitz_scalar(const std::function<double(ChartPoint)>& f) const {
  const int N = dim();
  constexpr std::size_t kChunk = 64;
  const std::size_t nchunks = (nodes_.size() + kChunk - 1) / kChunk;
  std::vector<Eigen::MatrixXcd> part(nchunks);
  parallel_for(nchunks, [&](std::size_t c) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(N, N);
    const std::size_t hi = std::min(nodes_.size(), (c + 1) * kChunk);
    for (std::size_t n = c * kChunk; n < hi; ++n) {
      const NodeData& d = nodes_[n];
      acc.noalias() += (d.weight * f(d.z)) * (d.ev.adjoint() * d.ev);
    }
    part[c] = std::move(acc);
  });
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(N, N);
  for (auto& P : part) T += P;
  return T;
}

Eigen::MatrixXcd SectionSpace::berezin_symbol_on(const Eigen::MatrixXcd& A, ChartPoint z) const {
  const Eigen::MatrixXcd e = ev(z);
  const Eigen::MatrixXcd rho = e * e.adjoint();
  return rho.llt().solve(e * A * e.adjoint());
}

Eigen::MatrixXcd SectionSpace::berezin_symbol_chart(const Eigen::MatrixXcd& A, ChartPoint z) const {
  const Eigen::MatrixXcd R = fiber_frame(z);
  return R.inverse() * berezin_symbol_on(A, z) * R;
}

std::vector<CoherentNode> SectionSpace::coherent_nodes(bool ring_only) const {
  const QuadratureRule& rule = op_rule_;
  std::vector<std::size_t> idx;
  std::vector<double> wts;
  if (ring_only) {
    for (int a = 0; a < rule.radial_count; ++a) {
      idx.push_back(std::size_t(a) * rule.angular_count);
      wts.push_back(rule.radial_weights[a]);
    }
  } else {
    for (std::size_t n = 0; n < rule.size(); ++n) {
      idx.push_back(n);
      wts.push_back(rule.weights[n]);
    }
  }
  std::vector<CoherentNode> out(idx.size());
  parallel_for(idx.size(), [&](std::size_t i) {
    const ChartPoint z = rule.nodes[idx[i]];
    const Eigen::MatrixXcd e = ev(z);
    Eigen::MatrixXcd rho = e * e.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    out[i].weight = wts[i] * model_.density(z);
    out[i].X = e.adjoint();
    out[i].rho_inv_sqrt = hermitian_inv_sqrt(rho);
  });
  return out;
}

}  // namespace berezin
