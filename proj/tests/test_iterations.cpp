#include <algorithm>
#include <cmath>

#include "berezin/iterations.hpp"
#include "berezin/linalg.hpp"
#include "doctest.h"

using namespace berezin;

namespace {

IterationConfig scalar_cfg(int p, Variant v = Variant::NuBalanced) {
  IterationConfig c;
  c.p = p;
  c.variant = v;
  return c;
}

double rel(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).norm() / b.norm(); }

// f(z) -> (b z + conj a)^p f((a z - conj b) / (b z + conj a)) on coefficient vectors
Eigen::MatrixXcd rotation_on_sections(int p, cplx a, cplx b) {
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(p + 1, p + 1);
  for (int j = 0; j <= p; ++j) {
    Eigen::VectorXcd poly = Eigen::VectorXcd::Zero(p + 1);
    poly(0) = 1.0;
    int deg = 0;
    auto times = [&](cplx c1, cplx c0) {  // multiply by c1 z + c0
      Eigen::VectorXcd out = Eigen::VectorXcd::Zero(p + 1);
      for (int k = 0; k <= deg; ++k) {
        out(k) += c0 * poly(k);
        out(k + 1) += c1 * poly(k);
      }
      poly = out;
      ++deg;
    };
    for (int i = 0; i < j; ++i) times(a, -std::conj(b));
    for (int i = j; i < p; ++i) times(b, std::conj(a));
    S.col(j) = poly;
  }
  return S;
}

}  // namespace

TEST_CASE("hermitian coordinates agree with the trace pairing") {
  const int n = 4;
  const Eigen::MatrixXcd X = random_hermitian(n, 5);
  const std::vector<Eigen::MatrixXcd> B = hermitian_basis(n);
  const Eigen::VectorXd c = hermitian_coordinates(X);
  for (std::size_t a = 0; a < B.size(); ++a) CHECK(std::abs(c(a) - (B[a] * X).trace().real()) < 1e-13);
  CHECK((from_hermitian_coordinates(c, n) - X).norm() < 1e-13);
}

TEST_CASE("gauge and scaling behaviour of the step") {
  for (Variant v : {Variant::NuBalanced, Variant::Canonical}) {
    const IterationConfig c = scalar_cfg(5, v);
    const ProdMatrix q = random_prod(6, 11);
    const ProdMatrix T = donaldson_map(q, c);
    CHECK(rel(donaldson_map(q.scaled(3.7), c).matrix(), 3.7 * T.matrix()) < 1e-12);
    // the gauge removes the scale
    CHECK(rel(donaldson_step(q.scaled(0.2), c).matrix(), donaldson_step(q, c).matrix()) < 1e-12);
    CHECK(std::abs(donaldson_step(q, c).matrix().trace().real() - 6.0) < 1e-12);
    IterationConfig d = c;
    d.gauge = Gauge::Det;
    CHECK(std::abs(donaldson_step(q, d).log_det() - reference_product(d).log_det()) < 1e-10);
  }
}

TEST_CASE("SU(2) equivariance") {
  const int p = 5;
  const cplx a = std::polar(std::cos(0.7), 0.3), b = std::polar(std::sin(0.7), -1.1);
  const Eigen::MatrixXcd S = rotation_on_sections(p, a, b);
  const Eigen::MatrixXcd g = S.inverse().adjoint();
  const ProdMatrix qs = round_balanced(p);
  // the rotation preserves the round product
  CHECK(rel(g * qs.matrix() * g.adjoint(), qs.matrix()) < 1e-12);
  for (Variant v : {Variant::NuBalanced, Variant::Canonical}) {
    const IterationConfig c = scalar_cfg(p, v);
    const ProdMatrix q = random_prod(p + 1, 21);
    const ProdMatrix lhs = donaldson_map(ProdMatrix(g * q.matrix() * g.adjoint()), c);
    const Eigen::MatrixXcd rhs = g * donaldson_map(q, c).matrix() * g.adjoint();
    CHECK(rel(lhs.matrix(), rhs) < 1e-10);
  }
}

TEST_CASE("closed-form fixed points") {
  for (int p : {1, 4, 7}) {
    const ProdMatrix qs = round_balanced(p);
    for (Variant v : {Variant::NuBalanced, Variant::Canonical}) {
      IterationConfig c = scalar_cfg(p, v);
      c.gauge = Gauge::Det;
      CHECK((donaldson_step(qs, c).matrix() - qs.matrix()).norm() <= 1e-10);
      CHECK((donaldson_map(qs, c).matrix() - qs.matrix()).norm() <= 1e-10);
    }
  }
  for (int a : {-1, 0, 2}) {
    IterationConfig c;
    c.p = 4;
    c.bundle = BundleSpec{{a, a}};
    const ProdMatrix qb = reference_product(c);
    CHECK((donaldson_map(qb, c).matrix() - qb.matrix()).norm() <= 1e-10);
    CHECK(certify_fixed_point(qb, c).rho_flatness < 1e-12);
  }
  // p = 0: dimension one
  const IterationConfig c0 = scalar_cfg(0);
  const ProdMatrix one = donaldson_step(ProdMatrix(Eigen::MatrixXcd::Constant(1, 1, 42.0)), c0);
  CHECK(std::abs(one.matrix()(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(donaldson_map(ProdMatrix(Eigen::MatrixXcd::Constant(1, 1, 42.0)), c0).matrix()(0, 0) - 42.0) <
        1e-12);
}

TEST_CASE("scalar iteration from a random start") {
  const IterationConfig c = scalar_cfg(8);
  const auto [q, tr] = iterate_to_fixed_point(random_prod(9, 7), c);
  CHECK(tr.converged);
  CHECK(tr.distances.back() < c.tol_fixed);
  CHECK(std::all_of(tr.distances.begin(), tr.distances.end(), [](double d) { return d >= 0.0; }));
  CHECK(tr.distances.size() == tr.gauge_factors.size());
  const FixedPointCertificate cert = certify_fixed_point(q, c);
  CHECK(cert.ok);
  CHECK(cert.rho_flatness <= 1e-7);
  // the limit is round up to scale: same Berezin spectrum
  const SpectrumReport s = berezin_spectrum(QuantumSetup(8, fs(q, 8), Measure::round_liouville()));
  for (int k = 0; k <= 8; ++k) CHECK(std::abs(s.eigenvalues[k] - gamma_closed_form(k, 8)) < 1e-8);
  // tail ratio near 1 - 2/p and near the Jacobian rate
  CHECK(std::abs(tr.rate - 0.75) <= 0.1 * 0.75);
  CHECK(tr.rate_window == 20);
  CHECK(tr.rate_spread <= 0.05);
  const RateReport r = contraction_rate(q, c);
  CHECK(std::abs(tr.rate - r.beta) <= 0.05 * r.beta);
  CHECK(r.neutral_dim == 1);
}

TEST_CASE("canonical iteration") {
  const IterationConfig c = scalar_cfg(8, Variant::Canonical);
  const auto [q, tr] = iterate_to_fixed_point(random_prod(9, 7), c);
  CHECK(tr.converged);
  CHECK(certify_fixed_point(q, c).ok);
  const double beta = 14.0 * 7.0 / (10.0 * 11.0);
  CHECK(std::abs(tr.rate - beta) <= 0.05 * beta);
}

TEST_CASE("Jacobian at the round point: Berezin and canonical closed forms") {
  for (int p : {3, 6}) {
    const ProdMatrix qs = round_balanced(p);
    const JacobianReport nu = jacobian_at(qs, scalar_cfg(p), JacobianMode::Analytic);
    const JacobianReport can = jacobian_at(qs, scalar_cfg(p, Variant::Canonical), JacobianMode::Analytic);
    std::size_t i = 0;
    for (int k = 0; k <= p; ++k)
      for (int m = 0; m < 2 * k + 1; ++m, ++i) CHECK(std::abs(nu.eigenvalues[i] - gamma_closed_form(k, p)) < 1e-9);
    std::vector<double> expect;
    for (int k = 0; k <= p; ++k)
      for (int m = 0; m < 2 * k + 1; ++m) expect.push_back((1.0 + double(k) * (k + 1) / p) * gamma_closed_form(k, p));
    std::sort(expect.begin(), expect.end(), std::greater<double>());
    for (std::size_t j = 0; j < expect.size(); ++j) CHECK(std::abs(can.eigenvalues[j] - expect[j]) < 1e-9);
    CHECK(nu.neutral_dim == 1);
    CHECK(can.neutral_dim == 4);
    CHECK(std::abs(can.beta - double((p + 6) * (p - 1)) / ((p + 2) * (p + 3))) < 1e-9);
    CHECK(std::abs(nu.beta - double(p) / (p + 2)) < 1e-9);
  }
}

TEST_CASE("analytic Jacobian against finite differences") {
  for (int p : {4, 8}) {
    for (Variant v : {Variant::NuBalanced, Variant::Canonical}) {
      const JacobianReport j = jacobian_compare(round_balanced(p), scalar_cfg(p, v));
      CHECK(j.fd_deviation <= 1e-5);
      CHECK(j.richardson < 1e-6);
    }
  }
  IterationConfig c;
  c.p = 3;
  c.bundle = BundleSpec{{0, 0}};
  const JacobianReport j = jacobian_compare(reference_product(c), c);
  CHECK(j.fd_deviation <= 1e-5);
  CHECK(j.neutral_dim == 4);
}

TEST_CASE("bundle Jacobian is the bundle Berezin operator") {
  IterationConfig c;
  c.p = 4;
  c.bundle = BundleSpec{{-1, -1}};
  const JacobianReport j = jacobian_at(reference_product(c), c, JacobianMode::Analytic);
  const SpectrumReport s = bundle_berezin_spectrum(BundleSetup::product_round(c.bundle, c.p));
  REQUIRE(j.eigenvalues.size() == s.all_eigenvalues.size());
  for (std::size_t i = 0; i < j.eigenvalues.size(); ++i) CHECK(std::abs(j.eigenvalues[i] - s.all_eigenvalues[i]) < 1e-9);
  const RateReport r = contraction_rate(reference_product(c), c);
  CHECK(r.neutral_dim == 4);
  CHECK(std::abs(r.beta - 3.0 / 5.0) < 1e-9);
}

TEST_CASE("d dbar of the coherent projector against the Laplacian of Berezin symbols") {
  const int p = 4;
  const ProdMatrix q = random_prod(p + 1, 3);
  const Eigen::MatrixXcd C = orthonormal_basis(q.matrix());
  const Eigen::MatrixXcd B = random_hermitian(p + 1, 8);
  const BidegreePoly P(C * B * C.adjoint());
  const BidegreePoly Q(C * C.adjoint());
  for (cplx z : {cplx(0.3, -0.2), cplx(2.0, 1.5), cplx(-0.05, 0.0)}) {
    Eigen::VectorXcd v(p + 1), dv(p + 1);
    for (int j = 0; j <= p; ++j) {
      v(j) = std::pow(z, j);
      dv(j) = j == 0 ? cplx(0.0) : double(j) * std::pow(z, j - 1);
    }
    // sanity: P / Q is the Berezin symbol of B in this basis
    const Eigen::VectorXcd u = C.adjoint() * v.conjugate();
    const double sym = (u.adjoint() * B * u)(0, 0).real() / u.squaredNorm();
    CHECK(std::abs(sym - (P(z) / Q(z)).real()) < 1e-12);
    const Eigen::MatrixXcd M = ddbar_projector(u, C.adjoint() * dv.conjugate());
    const double lhs = (B * M).trace().real();
    // constant area density 1: Delta = -4 d dbar
    const double rhs = -0.25 * laplace_beltrami_at([](ChartPoint) { return 1.0; }, P, Q, z);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("moment map identities") {
  for (Variant v : {Variant::NuBalanced, Variant::Canonical}) {
    const IterationConfig c = scalar_cfg(6, v);
    const MomentCheck m = check_moment_identity(round_balanced(6), c, 4);
    CHECK(m.identity_residual <= 1e-5);
    CHECK(m.mu_identity <= 1e-9);
  }
  IterationConfig c;
  c.p = 3;
  c.bundle = BundleSpec{{0, 0}};
  const MomentCheck m = check_moment_identity(reference_product(c), c, 3);
  CHECK(m.identity_residual <= 1e-5);
  CHECK(m.mu_identity <= 1e-9);
  // the rank-2 projector has trace 2 at each point: tr mu = Vol r
  const HermOp mu = moment_map(reference_product(c), random_hermitian(8, 2) + 6.0 * Eigen::MatrixXcd::Identity(8, 8), c);
  CHECK(std::abs(mu.matrix().trace().real() - 2.0) < 1e-10);
}

TEST_CASE("rate and neutral dimension over p") {
  for (int p : {8, 12}) {
    const RateReport s = contraction_rate(round_balanced(p), scalar_cfg(p));
    CHECK(s.neutral_dim == 1);
    CHECK(std::abs(p * (1.0 - s.beta) - 2.0) <= 0.4 + 1e-9);
    IterationConfig c;
    c.p = p;
    c.bundle = BundleSpec{{-1, -1}};
    const auto [q, tr] = iterate_to_fixed_point(random_prod(c.dim(), 2), c);
    CHECK(tr.converged);
    const RateReport b = contraction_rate(q, c);
    CHECK(b.method == "sector");
    CHECK(b.neutral_dim == 4);
    CHECK(std::abs(b.beta - double(p - 1) / (p + 1)) < 1e-9);
  }
}

TEST_CASE("unstable splitting does not converge") {
  IterationConfig c;
  c.p = 4;
  c.bundle = BundleSpec{{0, 1}};
  c.max_iters = 2000;
  const auto [q, tr] = iterate_to_fixed_point(random_prod(c.dim(), 3), c);
  CHECK_FALSE(tr.converged);
  CHECK(tr.stop_reason == "diverging block ratio");
  CHECK(tr.block_log_ratios.size() == tr.distances.size());
  // roughly linear drift of the block scale
  const std::size_t n = tr.block_log_ratios.size();
  CHECK(std::abs(tr.block_log_ratios[n - 1]) > std::abs(tr.block_log_ratios[n / 2]) + 10.0);
}

TEST_CASE("iteration validation") {
  IterationConfig c = scalar_cfg(3, Variant::Canonical);
  c.bundle = BundleSpec{{0, 0}};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  IterationConfig d = scalar_cfg(3);
  d.tol_fixed = 0.0;
  CHECK_THROWS_AS(d.validate(), ValidationError);
  CHECK_THROWS_AS(donaldson_map(random_prod(3, 1), scalar_cfg(3)), ValidationError);
  CHECK_THROWS_AS(scalar_cfg(0, Variant::Canonical).validate(), ValidationError);
}
