#include "berezin/iterations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "berezin/linalg.hpp"
#include "berezin/parallel.hpp"
#include "berezin/superop.hpp"

namespace berezin {

namespace {

bool scalar_case(const IterationConfig& cfg) { return cfg.rank() == 1; }
int scalar_level(const IterationConfig& cfg) { return cfg.p + cfg.bundle.degrees[0]; }
int top_level(const IterationConfig& cfg) { return cfg.p + cfg.bundle.max_degree(); }

SectionModel bare_model(const IterationConfig& cfg) {
  SectionModel m;
  m.p = cfg.p;
  m.degrees = cfg.bundle.degrees;
  return m;
}

Measure measure_for(const ProdMatrix& q, const IterationConfig& cfg) {
  if (cfg.variant == Variant::Canonical) return Measure::liouville_of_fs(q, scalar_level(cfg));
  return cfg.measure;
}

QuantumSetup scalar_setup(const ProdMatrix& q, const IterationConfig& cfg, const QuadratureRule& rule) {
  const int L = scalar_level(cfg);
  return QuantumSetup(L, fs(q, L), measure_for(q, cfg), rule);
}

BundleSetup bundle_setup(const ProdMatrix& q, const IterationConfig& cfg, const QuadratureRule& rule) {
  return BundleSetup(cfg.bundle, cfg.p, bundle_fs(q, cfg.bundle, cfg.p), cfg.measure, rule);
}

ProdMatrix map_on(const ProdMatrix& q, const IterationConfig& cfg, const QuadratureRule& rule) {
  if (scalar_case(cfg)) return hilb(scalar_setup(q, cfg, rule));
  return bundle_hilb(bundle_setup(q, cfg, rule));
}

Eigen::MatrixXcd cholesky_factor(const ProdMatrix& q) {
  Eigen::LLT<Eigen::MatrixXcd> llt(q.matrix());
  if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization failed");
  return llt.matrixL();
}

Eigen::MatrixXcd lower_inverse(const Eigen::MatrixXcd& L) {
  return L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(L.rows(), L.cols()));
}

// L^{-1} (T(L (I + h E) L^dagger) - T(L (I - h E) L^dagger)) L^{-dagger} / 2h
Eigen::MatrixXcd central_difference(const ProdMatrix& q, const Eigen::MatrixXcd& L, const Eigen::MatrixXcd& Linv,
                                    const Eigen::MatrixXcd& E, double h, const IterationConfig& cfg,
                                    const QuadratureRule& rule) {
  const int N = q.dim();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  const ProdMatrix qp(L * (I + h * E) * L.adjoint());
  const ProdMatrix qm(L * (I - h * E) * L.adjoint());
  const Eigen::MatrixXcd d = (map_on(qp, cfg, rule).matrix() - map_on(qm, cfg, rule).matrix()) / (2.0 * h);
  const Eigen::MatrixXcd r = Linv * d * Linv.adjoint();
  return 0.5 * (r + r.adjoint());
}

constexpr double kFdStep = 1e-5;

// Richardson-combined directional derivative; fills the O(h^2) check
Eigen::MatrixXcd fd_direction(const ProdMatrix& q, const Eigen::MatrixXcd& L, const Eigen::MatrixXcd& Linv,
                              const Eigen::MatrixXcd& E, const IterationConfig& cfg, const QuadratureRule& rule,
                              double* check) {
  double h = kFdStep;
  for (int attempt = 0; attempt < 3; ++attempt, h /= 10.0) {
    try {
      const Eigen::MatrixXcd a = central_difference(q, L, Linv, E, h, cfg, rule);
      const Eigen::MatrixXcd b = central_difference(q, L, Linv, E, 0.5 * h, cfg, rule);
      if (check) *check = (a - b).cwiseAbs().maxCoeff();
      return (4.0 * b - a) / 3.0;
    } catch (const NumericalError&) {
    }
  }
  throw NumericalError("finite-difference step failed after shrinking");
}

void fill_spectrum(JacobianReport& r) {
  const Eigen::MatrixXd S = 0.5 * (r.matrix + r.matrix.transpose());
  r.asymmetry = r.matrix.size() ? (r.matrix - r.matrix.transpose()).cwiseAbs().maxCoeff() : 0.0;
  const Eigen::VectorXd e = symmetric_eigenvalues(S);
  std::vector<double> ev(e.data(), e.data() + e.size());
  const RateReport rr = rate_from_eigenvalues(ev);
  r.eigenvalues = rr.eigenvalues;
  r.neutral_dim = rr.neutral_dim;
  r.beta = rr.beta;
}

// scalar D T = T (1 + Delta/4pi) T^* (Canonical) or T T^* (NuBalanced), assembled as
// sum_n w_n coords(Q_n) coords(S_n)^T with Q = x^dagger x
Eigen::MatrixXd scalar_analytic(const ProdMatrix& q, const IterationConfig& cfg) {
  const QuadratureRule rule = jacobian_rule(cfg);
  const QuantumSetup S = scalar_setup(q, cfg, rule);
  const int N = S.dim();
  const Eigen::Index D = Eigen::Index(N) * N;
  const Eigen::MatrixXcd& C = S.space().basis();
  const bool canonical = cfg.variant == Variant::Canonical;
  Eigen::MatrixXd A(D, rule.size()), B(D, rule.size());
  parallel_for(rule.size(), [&](std::size_t n) {
    const ChartPoint z = rule.nodes[n];
    const double d = S.measure().density(z);
    const Eigen::RowVectorXcd x = S.space().ev(z).row(0);
    const Eigen::MatrixXcd Q = x.adjoint() * x;
    const double rho = x.squaredNorm();
    A.col(n) = rule.weights[n] * hermitian_coordinates(Q);
    Eigen::VectorXd s = d / rho * hermitian_coordinates(Q);
    if (canonical) {
      Eigen::VectorXcd v(N), dv(N);
      cplx zj = 1.0;
      for (int j = 0; j < N; ++j) {
        v(j) = zj;
        dv(j) = j == 0 ? cplx(0.0) : double(j) * (j == 1 ? cplx(1.0) : std::pow(z, j - 1));
        zj *= z;
      }
      const Eigen::VectorXcd u = C.adjoint() * v.conjugate();
      const Eigen::VectorXcd du = C.adjoint() * dv.conjugate();
      s -= hermitian_coordinates(ddbar_projector(u, du));
    }
    B.col(n) = s;
  });
  return A * B.transpose();
}

Eigen::MatrixXd fd_matrix(const ProdMatrix& q, const IterationConfig& cfg, double* richardson) {
  const QuadratureRule rule = iteration_rule(cfg);
  const int N = q.dim();
  const Eigen::MatrixXcd L = cholesky_factor(q), Linv = lower_inverse(L);
  const std::vector<Eigen::MatrixXcd> basis = hermitian_basis(N);
  const Eigen::Index D = Eigen::Index(basis.size());
  Eigen::MatrixXd J(D, D);
  std::vector<double> chk(basis.size(), 0.0);
  parallel_for(basis.size(), [&](std::size_t b) {
    J.col(b) = hermitian_coordinates(fd_direction(q, L, Linv, basis[b], cfg, rule, &chk[b]));
  });
  if (richardson) *richardson = *std::max_element(chk.begin(), chk.end());
  return J;
}

// zero the entries coupling different rotation charges when they are already negligible
std::optional<ProdMatrix> rotation_symmetrized(const ProdMatrix& q, const IterationConfig& cfg) {
  const std::vector<int> ch = bare_model(cfg).charges();
  Eigen::MatrixXcd m = q.matrix();
  const double scale = m.cwiseAbs().maxCoeff();
  for (int a = 0; a < q.dim(); ++a)
    for (int b = 0; b < q.dim(); ++b)
      if (ch[a] != ch[b]) {
        const double bound = 1e-8 * std::sqrt(std::abs(m(a, a)) * std::abs(m(b, b)));
        if (std::abs(m(a, b)) > std::max(bound, 1e-300 * scale)) return std::nullopt;
        m(a, b) = 0.0;
      }
  return ProdMatrix(m);
}

std::vector<ChartPoint> sample_points(int n) {
  // Fibonacci points on the sphere, stereographic from the south pole
  std::vector<ChartPoint> z;
  const double golden = constants::kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double x3 = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - x3 * x3));
    const double phi = golden * i;
    z.push_back(std::polar(r / (1.0 + x3), phi));
  }
  return z;
}

double block_log_ratio(const ProdMatrix& q, const ProdMatrix& ref, const IterationConfig& cfg) {
  const SectionModel m = bare_model(cfg);
  auto mean_scale = [&](int i) {
    double s = 0.0;
    const int off = m.block_offset(i), n = m.block_size(i);
    for (int j = 0; j < n; ++j) s += q.matrix()(off + j, off + j).real() / ref.matrix()(off + j, off + j).real();
    return s / n;
  };
  return std::log(mean_scale(m.rank() - 1) / mean_scale(0));
}

const char* variant_name(Variant v) { return v == Variant::Canonical ? "canonical" : "nu"; }
const char* gauge_name(Gauge g) { return g == Gauge::Det ? "det" : "trace"; }

}  // namespace

void IterationConfig::validate() const {
  if (p < 0) throw ValidationError("p must be nonnegative");
  if (bundle.degrees.empty()) throw ValidationError("bundle needs at least one summand");
  bundle.validate(p);
  if (variant == Variant::Canonical) {
    if (rank() != 1) throw ValidationError("the canonical variant is defined for line bundles only");
    if (p + bundle.degrees[0] < 1) throw ValidationError("the canonical variant needs level >= 1");
  }
  if (!(tol_fixed > 0.0)) throw ValidationError("tol_fixed must be positive");
  if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
}

nlohmann::json IterationConfig::describe() const {
  return {{"variant", variant_name(variant)},
          {"p", p},
          {"degrees", bundle.degrees},
          {"measure", variant == Variant::Canonical ? std::string("liouville_of_fs") : measure.name()},
          {"tol", tol_fixed},
          {"max_iters", max_iters},
          {"gauge", gauge_name(gauge)}};
}

nlohmann::json IterationTrace::to_json() const {
  nlohmann::json j = {{"distances", distances},
                      {"gauge_factors", gauge_factors},
                      {"converged", converged},
                      {"iterations", iterations},
                      {"stop_reason", stop_reason},
                      {"rate_window", rate_window}};
  j["rate"] = std::isfinite(rate) ? nlohmann::json(rate) : nlohmann::json(nullptr);
  j["rate_spread"] = std::isfinite(rate_spread) ? nlohmann::json(rate_spread) : nlohmann::json(nullptr);
  if (!block_log_ratios.empty()) j["block_log_ratios"] = block_log_ratios;
  return j;
}

QuadratureRule iteration_rule(const IterationConfig& cfg) {
  const int L = top_level(cfg);
  if (cfg.variant == Variant::Canonical) return make_quadrature(4 * L + 8, 2 * L + 4);
  int m = 2 * L + 8, d = L + 4;
  if (cfg.measure.polynomial()) {
    m += cfg.measure.weight_power();
    d += cfg.measure.numerator_degree();
  }
  return make_quadrature(m, d);
}

QuadratureRule jacobian_rule(const IterationConfig& cfg) {
  const int L = top_level(cfg);
  int m = 4 * L + 8, d = 2 * L + 4;
  if (cfg.variant == Variant::NuBalanced && cfg.measure.polynomial()) {
    m += cfg.measure.weight_power();
    d += cfg.measure.numerator_degree();
  }
  return make_quadrature(m, d);
}

ProdMatrix donaldson_map(const ProdMatrix& q, const IterationConfig& cfg) {
  cfg.validate();
  if (q.dim() != cfg.dim()) throw ValidationError("q has the wrong dimension");
  // far from balanced the fixed rule is not accurate; refine until the Gram settles
  if (scalar_case(cfg)) {
    const int L = scalar_level(cfg);
    return hilb(QuantumSetup(L, fs(q, L), measure_for(q, cfg)));
  }
  return bundle_hilb(BundleSetup(cfg.bundle, cfg.p, bundle_fs(q, cfg.bundle, cfg.p), cfg.measure));
}

ProdMatrix reference_product(const IterationConfig& cfg) {
  const SectionModel m = bare_model(cfg);
  const int N = m.dim(), r = m.rank();
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(N, N);
  for (int i = 0; i < r; ++i) {
    const int n = m.block_size(i), off = m.block_offset(i);
    // round Gram of z^j is 1 / (n binom(n-1, j)); the Hilb constant is N / r
    const double c = r == 1 ? 1.0 : double(N) / (r * n);
    double binom = 1.0;
    for (int j = 0; j < n; ++j) {
      q(off + j, off + j) = c / binom;
      binom = binom * (n - 1 - j) / (j + 1);
    }
  }
  return ProdMatrix(q);
}

ProdMatrix gauge_normalize(const ProdMatrix& q, const IterationConfig& cfg, double* factor) {
  double f;
  if (cfg.gauge == Gauge::Trace) {
    f = q.dim() / q.matrix().trace().real();
  } else {
    f = std::exp((reference_product(cfg).log_det() - q.log_det()) / q.dim());
  }
  if (!(f > 0.0) || !std::isfinite(f)) throw NumericalError("gauge factor is not finite");
  if (factor) *factor = f;
  return q.scaled(f);
}

ProdMatrix donaldson_step(const ProdMatrix& q, const IterationConfig& cfg) {
  return gauge_normalize(donaldson_map(q, cfg), cfg);
}

std::pair<ProdMatrix, IterationTrace> iterate_to_fixed_point(const ProdMatrix& q0, const IterationConfig& cfg) {
  cfg.validate();
  if (q0.dim() != cfg.dim()) throw ValidationError("q0 has the wrong dimension");
  const QuadratureRule rule = iteration_rule(cfg);
  const bool blocks = cfg.rank() > 1;
  const ProdMatrix ref = reference_product(cfg);
  IterationTrace tr;
  ProdMatrix q = gauge_normalize(q0, cfg);
  tr.stop_reason = "max_iters";
  for (int it = 0; it < cfg.max_iters; ++it) {
    double f = 1.0, d = 0.0;
    ProdMatrix qn;
    try {
      qn = gauge_normalize(map_on(q, cfg, rule), cfg, &f);
      d = prod_distance(q, qn);
    } catch (const NumericalError& e) {
      tr.stop_reason = std::string("numerical: ") + e.what();
      break;
    }
    tr.distances.push_back(d);
    tr.gauge_factors.push_back(f);
    q = qn;
    tr.iterations = it + 1;
    if (blocks) tr.block_log_ratios.push_back(block_log_ratio(q, ref, cfg));
    if (!std::isfinite(d)) {
      tr.stop_reason = "non-finite distance";
      break;
    }
    if (d < cfg.tol_fixed) {
      tr.converged = true;
      tr.stop_reason = "tolerance";
      break;
    }
    // an unstable splitting pushes the block scales apart without bound
    if (blocks && std::abs(tr.block_log_ratios.back()) > 40.0) {
      tr.stop_reason = "diverging block ratio";
      break;
    }
  }
  const std::size_t n = tr.distances.size();
  if (n >= 2) {
    const std::size_t w = std::min<std::size_t>(20, n - 1);
    std::vector<double> ratios;
    for (std::size_t i = n - w; i < n; ++i)
      if (tr.distances[i - 1] > 0.0) ratios.push_back(tr.distances[i] / tr.distances[i - 1]);
    if (!ratios.empty()) {
      double lg = 0.0;
      for (double r : ratios) lg += std::log(std::max(r, 1e-300));
      tr.rate = std::exp(lg / ratios.size());
      const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
      tr.rate_spread = (*mx - *mn) / tr.rate;
      tr.rate_window = static_cast<int>(ratios.size());
    }
  }
  tr.final_q = q;
  return {q, tr};
}

FixedPointCertificate certify_fixed_point(const ProdMatrix& q, const IterationConfig& cfg, double tol) {
  cfg.validate();
  const QuadratureRule rule = iteration_rule(cfg);
  FixedPointCertificate c;
  // compare in the gauge, so an unnormalized fixed point still certifies
  c.step_distance = prod_distance(gauge_normalize(q, cfg), gauge_normalize(map_on(q, cfg, rule), cfg));
  const std::vector<ChartPoint> pts = sample_points(64);
  std::vector<Eigen::MatrixXcd> rho;
  if (scalar_case(cfg)) {
    const QuantumSetup S = scalar_setup(q, cfg, rule);
    for (ChartPoint z : pts) rho.push_back(S.space().rawnsley(z));
  } else {
    const BundleSetup S = bundle_setup(q, cfg, rule);
    for (ChartPoint z : pts) rho.push_back(S.space().rawnsley(z));
  }
  const int r = cfg.rank();
  double mean = 0.0;
  for (const auto& m : rho) mean += m.trace().real() / r;
  mean /= rho.size();
  double flat = 0.0;
  for (const auto& m : rho)
    flat = std::max(flat, op_norm(m - mean * Eigen::MatrixXcd::Identity(r, r)) / mean);
  c.rho_flatness = flat;
  c.ok = c.step_distance <= cfg.tol_fixed && flat <= tol;
  return c;
}

RateReport rate_from_eigenvalues(std::vector<double> evals, double neutral_tol) {
  std::sort(evals.begin(), evals.end(), std::greater<double>());
  RateReport r;
  r.eigenvalues = evals;
  for (double e : evals) {
    if (std::abs(e - 1.0) <= neutral_tol) {
      ++r.neutral_dim;
    } else if (e < 1.0 - neutral_tol && !r.gap_found) {
      r.beta = e;
      r.gap_found = true;
    }
  }
  return r;
}

JacobianReport jacobian_at(const ProdMatrix& q, const IterationConfig& cfg, JacobianMode mode) {
  cfg.validate();
  if (q.dim() != cfg.dim()) throw ValidationError("q has the wrong dimension");
  JacobianReport r;
  if (mode == JacobianMode::FiniteDifference) {
    r.matrix = fd_matrix(q, cfg, &r.richardson);
    r.method = "finite_difference";
  } else if (scalar_case(cfg)) {
    r.matrix = scalar_analytic(q, cfg);
    r.method = "analytic";
  } else {
    // T T^* of the bundle; the Hermitian restriction needs rho scalar, true at fixed points
    r.matrix = bundle_berezin_operator_hermitian(bundle_setup(q, cfg, iteration_rule(cfg)));
    r.method = "analytic";
  }
  fill_spectrum(r);
  return r;
}

JacobianReport jacobian_compare(const ProdMatrix& q, const IterationConfig& cfg) {
  JacobianReport a = jacobian_at(q, cfg, JacobianMode::Analytic);
  const JacobianReport f = jacobian_at(q, cfg, JacobianMode::FiniteDifference);
  a.fd_deviation = (a.matrix - f.matrix).cwiseAbs().maxCoeff();
  a.richardson = f.richardson;
  return a;
}

RateReport contraction_rate(const ProdMatrix& q, const IterationConfig& cfg) {
  cfg.validate();
  if (!scalar_case(cfg) && cfg.variant == Variant::NuBalanced) {
    // the fixed points here are rotation invariant up to round-off: use the sector form
    if (auto qs = rotation_symmetrized(q, cfg)) {
      const BundleSetup S = bundle_setup(*qs, cfg, iteration_rule(cfg));
      if (S.rotation_invariant()) {
        RateReport r = rate_from_eigenvalues(bundle_berezin_spectrum(S).all_eigenvalues);
        r.method = "sector";
        return r;
      }
    }
  }
  const JacobianReport j = jacobian_at(q, cfg, JacobianMode::Analytic);
  RateReport r = rate_from_eigenvalues(j.eigenvalues);
  r.method = "dense";
  return r;
}

HermOp moment_map(const ProdMatrix& q, const Eigen::MatrixXcd& G, const IterationConfig& cfg) {
  cfg.validate();
  const int N = q.dim();
  if (N != cfg.dim() || G.rows() != N || G.cols() != N) throw ValidationError("moment_map: dimension mismatch");
  const QuadratureRule rule = iteration_rule(cfg);
  const SectionModel model = bare_model(cfg);
  const Eigen::MatrixXcd L = cholesky_factor(q), Linv = lower_inverse(L);
  std::optional<ProdMatrix> qG;
  if (cfg.variant == Variant::Canonical) {
    const Eigen::MatrixXcd GG = G.adjoint() * G;
    qG = ProdMatrix(L * GG.inverse() * L.adjoint());
  }
  std::vector<Eigen::MatrixXcd> part(rule.size());
  parallel_for(rule.size(), [&](std::size_t n) {
    const ChartPoint z = rule.nodes[n];
    const double dens = qG ? fs_kahler_density(*qG, scalar_level(cfg), z) : cfg.measure.density(z);
    const Eigen::MatrixXcd Y = G * (Linv * model.evaluation(z).adjoint());
    const Eigen::MatrixXcd g = Y.adjoint() * Y;
    part[n] = (rule.weights[n] * dens) * (Y * g.ldlt().solve(Y.adjoint()));
  });
  Eigen::MatrixXcd mu = Eigen::MatrixXcd::Zero(N, N);
  for (const auto& m : part) mu += m;
  return HermOp(0.5 * (mu + mu.adjoint()));
}

MomentCheck check_moment_identity(const ProdMatrix& q, const IterationConfig& cfg, int tests, std::uint64_t seed) {
  cfg.validate();
  if (tests < 1) throw ValidationError("need at least one test direction");
  const int N = q.dim(), r = cfg.rank();
  const QuadratureRule rule = iteration_rule(cfg);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  const Eigen::MatrixXcd L = cholesky_factor(q), Linv = lower_inverse(L);
  double vol;
  {
    const Measure nu = measure_for(q, cfg);
    std::vector<double> w(rule.size());
    for (std::size_t n = 0; n < rule.size(); ++n) w[n] = rule.weights[n] * nu.density(rule.nodes[n]);
    vol = pairwise_sum(w);
  }
  MomentCheck mc;
  mc.tests = tests;
  mc.mu_identity = (moment_map(q, I, cfg).matrix() - (vol * r / N) * I).norm();
  auto dmu = [&](const Eigen::MatrixXcd& B, double h) {
    const Eigen::MatrixXcd a = moment_map(q, hermitian_exp(0.5 * h * B), cfg).matrix();
    const Eigen::MatrixXcd b = moment_map(q, hermitian_exp(-0.5 * h * B), cfg).matrix();
    return Eigen::MatrixXcd((a - b) / (2.0 * h));
  };
  double worst = 0.0;
  for (int t = 0; t < tests; ++t) {
    Eigen::MatrixXcd B = random_hermitian(N, seed + t);
    B /= B.norm();
    const Eigen::MatrixXcd Dm = (4.0 * dmu(B, 0.5 * kFdStep) - dmu(B, kFdStep)) / 3.0;
    const Eigen::MatrixXcd DT = fd_direction(q, L, Linv, B, cfg, rule, nullptr);
    worst = std::max(worst, (double(N) / (vol * r) * Dm - (B - DT)).norm());
  }
  mc.identity_residual = worst;
  return mc;
}

Eigen::VectorXd hermitian_coordinates(const Eigen::MatrixXcd& X) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd c(n * n);
  const double s = std::sqrt(2.0);
  Eigen::Index i = 0;
  for (Eigen::Index j = 0; j < n; ++j) c(i++) = X(j, j).real();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const cplx h = 0.5 * (X(j, k) + std::conj(X(k, j)));
      c(i++) = s * h.real();
      c(i++) = s * h.imag();
    }
  return c;
}

Eigen::MatrixXcd from_hermitian_coordinates(const Eigen::VectorXd& c, int n) {
  if (c.size() != Eigen::Index(n) * n) throw ValidationError("coordinate vector has the wrong length");
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Index i = 0;
  for (int j = 0; j < n; ++j) X(j, j) = c(i++);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      const cplx v(s * c(i), s * c(i + 1));
      i += 2;
      X(j, k) = v;
      X(k, j) = std::conj(v);
    }
  return X;
}

Eigen::MatrixXcd ddbar_projector(const Eigen::VectorXcd& u, const Eigen::VectorXcd& du) {
  const double n = u.squaredNorm();
  const cplx a = u.dot(du);   // u^dagger du
  const double b = du.squaredNorm();
  const Eigen::MatrixXcd uu = u * u.adjoint();
  const Eigen::MatrixXcd dud = du * du.adjoint();
  const Eigen::MatrixXcd duu = du * u.adjoint();
  Eigen::MatrixXcd M = dud / n - duu * (std::conj(a) / (n * n)) - duu.adjoint() * (a / (n * n)) -
                       uu * (b / (n * n)) + uu * (2.0 * std::norm(a) / (n * n * n));
  return 0.5 * (M + M.adjoint());
}

}  // namespace berezin
