#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "berezin/geometry.hpp"
#include "berezin/superop.hpp"
#include "berezin/types.hpp"

namespace berezin {

// Everything that determines H^0(E (x) L^p) with its L^2 product:
// blocks O(p + a_i) with monomial bases, a pointwise fiber metric W(z)
// (including the L^p factor), a measure density and exactness hints.
struct SectionModel {
  int p = 0;
  std::vector<int> degrees;  // a_i
  std::function<Eigen::MatrixXcd(ChartPoint)> fiber_metric;
  std::function<double(ChartPoint)> density;  // per Lebesgue/pi
  bool radial = false;      // W and density depend on |z| only
  bool polynomial = false;  // integrands are polynomial in u for the hinted rule
  int exact_m = 0;          // rule hints, used when polynomial
  int exact_d = 0;

  int rank() const { return static_cast<int>(degrees.size()); }
  int dim() const;
  int block_offset(int i) const;
  int block_size(int i) const { return p + degrees[i] + 1; }
  // r x N chart-frame evaluation matrix
  Eigen::MatrixXcd evaluation(ChartPoint z) const;
  // rotation charge (monomial degree) of each basis index
  std::vector<int> charges() const;
};

// gram over monomials from a rule: sum_n w_n V^dagger W V
Eigen::MatrixXcd model_gram(const SectionModel& m, const QuadratureRule& rule);
// rule meeting the model's exactness, or refined until the Gram settles (rtol 1e-10, <= 6 doublings)
QuadratureRule choose_rule(const SectionModel& m, const QuadratureRule* base = nullptr);

class SectionSpace {
 public:
  SectionSpace(SectionModel model, QuadratureRule rule);
  explicit SectionSpace(SectionModel model);

  const SectionModel& model() const { return model_; }
  const QuadratureRule& rule() const { return rule_; }
  int dim() const { return model_.dim(); }
  int rank() const { return model_.rank(); }
  const ProdMatrix& gram() const { return gram_; }
  // monomial coefficients of the orthonormal basis (columns)
  const Eigen::MatrixXcd& basis() const { return C_; }
  double mass() const { return mass_; }

  // fiber orthonormal frame R (W = R^dagger R) and ev = R V C, both at z
  Eigen::MatrixXcd fiber_frame(ChartPoint z) const;
  Eigen::MatrixXcd ev(ChartPoint z) const;
  Eigen::MatrixXcd rawnsley(ChartPoint z) const;  // ev ev^dagger, fiber-ON frame

  // sum_n w_n ev^dagger (R F R^{-1}) ev for a chart-frame endomorphism field F
  Eigen::MatrixXcd toeplitz(const std::function<Eigen::MatrixXcd(ChartPoint)>& F) const;
  // scalar multiplier f(z) Id
  Eigen::MatrixXcd toeplitz_scalar(const std::function<double(ChartPoint)>& f) const;

  // rho^{-1} ev A ev^dagger in the fiber-ON frame
  Eigen::MatrixXcd berezin_symbol_on(const Eigen::MatrixXcd& A, ChartPoint z) const;
  // the same endomorphism in the chart frame
  Eigen::MatrixXcd berezin_symbol_chart(const Eigen::MatrixXcd& A, ChartPoint z) const;

  // nodes for the super-operator (finer rule); ring_only keeps theta = 0 with ring weights
  std::vector<CoherentNode> coherent_nodes(bool ring_only) const;
  const QuadratureRule& operator_rule() const { return op_rule_; }

 private:
  struct NodeData {
    ChartPoint z;
    double weight;
    Eigen::MatrixXcd R, Rinv, ev;
  };
  NodeData node_data(ChartPoint z, double w) const;

  SectionModel model_;
  QuadratureRule rule_;
  QuadratureRule op_rule_;
  ProdMatrix gram_;
  Eigen::MatrixXcd C_;
  double mass_ = 0.0;
  std::vector<NodeData> nodes_;
};

}  // namespace berezin
