#include <cmath>
#include <random>

#include "berezin/geometry.hpp"
#include "berezin/quantization.hpp"
#include "doctest.h"

using namespace berezin;
using constants::kPi;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

FrameFunction random_band_limited(std::mt19937_64& g, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd c(d + 1, d + 1);
  for (int j = 0; j <= d; ++j)
    for (int k = j; k <= d; ++k) {
      const double re = n(g), im = (j == k) ? 0.0 : n(g);
      c(j, k) = cplx(re, im);
      c(k, j) = std::conj(c(j, k));
    }
  return {BidegreePoly(c), d};
}

cplx rnd(std::mt19937_64& g) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double a = n(g);
  const double b = n(g);
  return {a, b};
}

}  // namespace

TEST_CASE("make_quadrature examples") {
  const QuadratureRule r = make_quadrature(6, 4);
  auto round = [](ChartPoint z) { return cplx(round_density(z)); };
  CHECK(integrate(r, round).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(integrate(r, [](ChartPoint z) { return z * round_density(z); })) < 1e-14);
  // Beta moment p = 4, j = 2
  const cplx m = integrate(r, [](ChartPoint z) { return std::pow(std::norm(z), 2) / std::pow(1 + std::norm(z), 6); });
  CHECK(m.real() == doctest::Approx(1.0 / 30.0).epsilon(1e-13));
  CHECK_THROWS_AS(make_quadrature(3, 2), ValidationError);
}

TEST_CASE("integrate examples") {
  const QuadratureRule r = make_quadrature(8, 4);
  const FrameFunction x3 = FrameFunction::x3();
  CHECK(integrate(r, [](ChartPoint z) { return cplx(round_density(z)); }).real() == doctest::Approx(1.0));
  CHECK(std::abs(integrate(r, [&](ChartPoint z) { return x3(z) * round_density(z); })) < 1e-14);
  CHECK(integrate(r, [&](ChartPoint z) { return x3(z) * x3(z) * round_density(z); }).real() ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK_THROWS_AS(integrate(r, [](ChartPoint) { return cplx(NAN); }), NumericalError);
}

TEST_CASE("property: quadrature exactness against Beta moments") {
  for (int m = 2; m <= 30; m += 3)
    for (int d = 0; d <= m - 2; d += 2) {
      const QuadratureRule r = make_quadrature(m, d);
      for (int j = 0; j <= d; ++j)
        for (int k = 0; k <= d; ++k) {
          if (j > m - 2 || k > m - 2) continue;
          const cplx v = integrate(r, [&](ChartPoint z) {
            return std::pow(z, j) * std::pow(std::conj(z), k) / std::pow(1 + std::norm(z), m);
          });
          if (j == k) {
            const double exact = factorial(j) * factorial(m - j - 2) / factorial(m - 1);
            CHECK(std::abs(v - exact) <= 1e-12 * exact);
          } else {
            CHECK(std::abs(v) <= 1e-14);
          }
        }
    }
}

TEST_CASE("property: node doubling leaves Gram matrices unchanged") {
  for (int p : {2, 6, 11}) {
    const QuantumSetup s = QuantumSetup::round(p);
    const SectionModel& m = s.space().model();
    const Eigen::MatrixXcd G1 = model_gram(m, s.rule());
    const Eigen::MatrixXcd G2 = model_gram(m, s.rule().refined());
    CHECK((G1 - G2).norm() < 1e-10);
  }
}

TEST_CASE("fs_kahler_density examples") {
  const ProdMatrix q = round_balanced(3);
  CHECK(fs_kahler_density(q, 3, 0.0) == doctest::Approx(3.0).epsilon(1e-13));
  const cplx z(0.3, -1.2);
  CHECK(fs_kahler_density(q, 3, z) == doctest::Approx(3.0 * round_density(z)).epsilon(1e-13));
  const QuadratureRule r = make_quadrature(12, 4).refined().refined();
  const double mass = integrate(r, [&](ChartPoint w) { return cplx(fs_kahler_density(q, 3, w)); }).real();
  CHECK(mass == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fs_kahler_density(ProdMatrix(Eigen::MatrixXcd::Identity(1, 1)), 0, z) == 0.0);
}

TEST_CASE("laplace_beltrami_at examples") {
  std::mt19937_64 g(3);
  const PointDensity a = round_area_density;
  CHECK(laplace_beltrami_at(a, FrameFunction::constant(2.0), cplx(0.4, 0.1)) == 0.0);
  const FrameFunction x1 = FrameFunction::x1(), x2 = FrameFunction::x2();
  const FrameFunction x12 = x1 * x2;
  for (int i = 0; i < 5; ++i) {
    const cplx z = rnd(g);
    CHECK(laplace_beltrami_at(a, x1, z) == doctest::Approx(8 * kPi * x1(z).real()).epsilon(1e-10));
    CHECK(laplace_beltrami_at(a, x12, z) == doctest::Approx(24 * kPi * x12(z).real()).epsilon(1e-10));
  }
  CHECK(lambda_k(1) == doctest::Approx(constants::kLambda1));
}

TEST_CASE("poisson_bracket_at examples") {
  std::mt19937_64 g(5);
  const PointDensity s = round_density;
  const FrameFunction f = random_band_limited(g, 2);
  const FrameFunction x1 = FrameFunction::x1(), x2 = FrameFunction::x2(), x3 = FrameFunction::x3();
  double c0 = 0.0;
  for (int i = 0; i < 10; ++i) {
    const cplx z = rnd(g);
    CHECK(std::abs(poisson_bracket_at(s, f, f, z)) < 1e-12);
    CHECK(std::abs(poisson_bracket_at(s, f, FrameFunction::constant(3.0), z)) < 1e-12);
    const double c = poisson_bracket_at(s, x1, x2, z) / x3(z).real();
    if (i == 0) c0 = c;
    CHECK(c == doctest::Approx(c0).epsilon(1e-10));
  }
  CHECK(c0 == doctest::Approx(-2 * constants::kPoissonConstant).epsilon(1e-12));
}

TEST_CASE("property: Laplacian is symmetric on the round sphere") {
  std::mt19937_64 g(19);
  const QuadratureRule r = make_quadrature(12, 10);
  for (int t = 0; t < 5; ++t) {
    const FrameFunction f = random_band_limited(g, 3), h = random_band_limited(g, 3);
    auto lhs = integrate(r, [&](ChartPoint z) { return f(z) * laplace_beltrami_at(round_area_density, h, z) * round_density(z); });
    auto rhs = integrate(r, [&](ChartPoint z) { return h(z) * laplace_beltrami_at(round_area_density, f, z) * round_density(z); });
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("property: Poisson bracket obeys Leibniz") {
  std::mt19937_64 g(23);
  for (int t = 0; t < 10; ++t) {
    const FrameFunction f = random_band_limited(g, 2), a = random_band_limited(g, 1), b = random_band_limited(g, 2);
    const cplx z = rnd(g);
    const double lhs = poisson_bracket_at(round_density, f, a * b, z);
    const double rhs = poisson_bracket_at(round_density, f, a, z) * b(z).real() +
                       a(z).real() * poisson_bracket_at(round_density, f, b, z);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("measures") {
  const Measure r = Measure::round_liouville();
  CHECK(r.radial());
  const Measure f = Measure::liouville_of_fs(round_balanced(4), 4);
  CHECK(f.density(0.5) == doctest::Approx(4 * round_density(0.5)));
  CHECK_THROWS_AS(Measure::fixed_density(FrameFunction(BidegreePoly::monomial(1, 0), 3)), ValidationError);
  const Measure neg = Measure::fixed_density(FrameFunction(BidegreePoly::constant(-1.0), 2));
  CHECK_THROWS_AS(neg.density(0.0), NumericalError);
}
