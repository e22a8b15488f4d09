#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "berezin/bundles.hpp"
#include "berezin/quantization.hpp"
#include "json.hpp"

namespace berezin {

enum class Variant { NuBalanced, Canonical };
enum class Gauge { Trace, Det };
enum class JacobianMode { Analytic, FiniteDifference };

struct IterationConfig {
  Variant variant = Variant::NuBalanced;
  int p = 0;
  BundleSpec bundle{{0}};
  Measure measure = Measure::round_liouville();  // NuBalanced only
  double tol_fixed = 1e-11;
  int max_iters = 10000;
  Gauge gauge = Gauge::Trace;

  int rank() const { return bundle.rank(); }
  int dim() const { return bundle.dim(p); }
  void validate() const;
  nlohmann::json describe() const;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct IterationTrace {
  std::vector<double> distances;      // d_r = dist(q_{r+1}, q_r)
  std::vector<double> gauge_factors;  // q_{r+1} = factor * T(q_r)
  // log of the mean block scale of the last block relative to the first, per step; bundles only
  std::vector<double> block_log_ratios;
  ProdMatrix final_q;
  bool converged = false;
  int iterations = 0;
  std::string stop_reason;
  // geometric mean of d_{r+1}/d_r over the tail window and its relative spread
  double rate = kNaN;
  double rate_spread = kNaN;
  int rate_window = 0;
  nlohmann::json to_json() const;
};

struct JacobianReport {
  std::vector<double> eigenvalues;  // decreasing
  int neutral_dim = 0;              // within 1e-8 of 1
  double beta = kNaN;               // largest eigenvalue below the neutral cluster
  double fd_deviation = kNaN;       // max |analytic - FD| entry, when both were computed
  double asymmetry = 0.0;           // max |J - J^T| entry
  double richardson = kNaN;         // FD only: max |D_h - D_{h/2}|
  Eigen::MatrixXd matrix;           // hermitian_basis ordering, q-orthonormal coordinates
  std::string method;
};

struct RateReport {
  double beta = kNaN;
  int neutral_dim = 0;
  bool gap_found = false;
  std::vector<double> eigenvalues;
  std::string method;
};

struct FixedPointCertificate {
  double step_distance = kNaN;  // dist(T(q), q) after gauge
  double rho_flatness = kNaN;   // max |rho - mean| / mean over sample points
  bool ok = false;
};

struct MomentCheck {
  double identity_residual = kNaN;  // max over tests of |(N/(Vol r)) D mu(B) - (B - DT(B))|_F
  double mu_identity = kNaN;        // |mu(Id) - (Vol r / N) Id|_F
  int tests = 0;
};

// fixed rule used by every step of a run, so the discrete map is smooth in q
QuadratureRule iteration_rule(const IterationConfig& cfg);
QuadratureRule jacobian_rule(const IterationConfig& cfg);

// Hilb(FS(q)) with the variant's measure, no gauge, on a rule refined until the Gram settles.
// iterate_to_fixed_point and the FD Jacobian use iteration_rule throughout instead.
ProdMatrix donaldson_map(const ProdMatrix& q, const IterationConfig& cfg);
ProdMatrix gauge_normalize(const ProdMatrix& q, const IterationConfig& cfg, double* factor = nullptr);
ProdMatrix donaldson_step(const ProdMatrix& q, const IterationConfig& cfg);
// blockwise diag(1/binom) scaled by the Hilb constant; the fixed point for O(a)+...+O(a)
ProdMatrix reference_product(const IterationConfig& cfg);

std::pair<ProdMatrix, IterationTrace> iterate_to_fixed_point(const ProdMatrix& q0, const IterationConfig& cfg);

FixedPointCertificate certify_fixed_point(const ProdMatrix& q, const IterationConfig& cfg, double tol = 1e-7);

// D_q T in the coordinates q(eps) = M (I + eps B) M^dagger, q = M M^dagger Cholesky, B in hermitian_basis
JacobianReport jacobian_at(const ProdMatrix& q, const IterationConfig& cfg, JacobianMode mode);
// both modes and their deviation
JacobianReport jacobian_compare(const ProdMatrix& q, const IterationConfig& cfg);
RateReport contraction_rate(const ProdMatrix& q, const IterationConfig& cfg);
RateReport rate_from_eigenvalues(std::vector<double> evals, double neutral_tol = 1e-8);

// mu(G) = int Pi_{Gz} dnu, Pi in q-orthonormal coordinates; Canonical uses the Liouville
// measure of q_G = M (G^dagger G)^{-1} M^dagger
HermOp moment_map(const ProdMatrix& q, const Eigen::MatrixXcd& G, const IterationConfig& cfg);
MomentCheck check_moment_identity(const ProdMatrix& q, const IterationConfig& cfg, int tests = 8,
                                  std::uint64_t seed = 1);

// vec coordinates Tr[B_a X] of a Hermitian X, hermitian_basis ordering
Eigen::VectorXd hermitian_coordinates(const Eigen::MatrixXcd& X);
Eigen::MatrixXcd from_hermitian_coordinates(const Eigen::VectorXd& c, int n);

// d dbar of the coherent projector u u^dagger / |u|^2 for antiholomorphic u with dbar u = du
Eigen::MatrixXcd ddbar_projector(const Eigen::VectorXcd& u, const Eigen::VectorXcd& du);

}  // namespace berezin
