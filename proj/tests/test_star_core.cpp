#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "vstar/star_core.hpp"

using namespace vstar;
using cplx = std::complex<double>;

TEST_CASE("grid basics") {
  Grid g(0.0, 1.0, 11);
  CHECK(g.step() == doctest::Approx(0.1));
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(10) == doctest::Approx(1.0));
  CHECK(g.length() == 1.0);
  CHECK(g.node_index(0.5) == 5);
  CHECK_THROWS_AS(g.node_index(0.55), std::invalid_argument);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1.0, 0.0, 11), std::invalid_argument);
}

TEST_CASE("triangular field rejects upper triangle and non-finite") {
  Grid g(0.0, 1.0, 5);
  TriangularField<double> f(g);
  CHECK(f.is_zero());
  CHECK_THROWS_AS(f(1, 2), std::out_of_range);
  auto k = make_kernel<double>(g, 0.0,
                               [](double tp, double t) { return tp * t; });
  CHECK(k.smooth()(4, 2) == doctest::Approx(1.0 * 0.5));
  CHECK_THROWS_AS(
      make_kernel<double>(g, 0.0,
                          [](double tp, double t) { return tp / (t - t); }),
      std::domain_error);
}

TEST_CASE("identity law is exact") {
  Grid g(0.0, 1.0, 41);
  auto one = GeneralizedKernel<double>::identity(g);
  auto f = make_kernel<double>(
      g, 0.7, [](double tp, double t) { return std::sin(3 * tp) + t * t; });
  auto lhs = star_product(one, f);
  auto rhs = star_product(f, one);
  CHECK(lhs.delta_coeff() == f.delta_coeff());
  CHECK(rhs.delta_coeff() == f.delta_coeff());
  CHECK(sup_norm(lhs - f) == 0.0); // bit-exact
  CHECK(sup_norm(rhs - f) == 0.0);
}

TEST_CASE("product diagonal of two Theta-supported kernels vanishes exactly") {
  Grid g(0.0, 2.0, 31);
  auto f = make_kernel<double>(g, 0.0,
                               [](double tp, double t) { return tp + 1; });
  auto k = make_kernel<double>(g, 0.0,
                               [](double tp, double t) { return t - 2; });
  auto p = star_product(f, k);
  for (int i = 0; i < g.size(); ++i) CHECK(p.smooth()(i, i) == 0.0);
}

TEST_CASE("spec'd product values") {
  Grid g(0.0, 1.0, 801);
  auto theta = theta_kernel<double>(g);
  // Theta * Theta = (t' - t)
  auto t2 = star_product(theta, theta);
  CHECK(t2.smooth()(800, 0) == doctest::Approx(1.0).epsilon(1e-12));
  // f = t', g = t' (so g(tau, t) = tau): integral of tau over [0,1] = 0.5
  auto fp = make_kernel<double>(g, 0.0,
                                [](double tp, double) { return tp; });
  auto pr = star_product(fp, fp);
  CHECK(pr.smooth()(800, 0) == doctest::Approx(0.5).epsilon(1e-9));
  // (2 Theta)^{*2} at (1,0) = 4
  auto two = theta_kernel<double>(g, 2.0);
  CHECK(star_power(two, 2).smooth()(800, 0) ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("Theta powers follow (t'-t)^{k-1}/(k-1)!") {
  Grid g(0.0, 1.0, 801);
  auto theta = theta_kernel<double>(g);
  double fact = 1.0;
  auto power = theta;
  for (int k = 2; k <= 6; ++k) {
    power = star_product(theta, power);
    fact *= (k - 1);
    auto exact = make_kernel<double>(g, 0.0, [&](double tp, double t) {
      return std::pow(tp - t, k - 1) / fact;
    });
    double dist = sup_norm(power - exact);
    // trapezoid is exact through k=3, O(h^2) beyond
    CHECK(dist <= (k <= 3 ? 1e-13 : 5e-5));
  }
  CHECK(star_power(theta, 3).smooth()(800, 0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(star_power(theta, 0).is_identity());
}

TEST_CASE("bilinearity is exact") {
  Grid g(0.0, 1.0, 41);
  auto f = make_kernel<double>(g, 1.0,
                               [](double tp, double t) { return tp - t; });
  auto a = make_kernel<double>(g, 0.5,
                               [](double tp, double t) { return tp * t; });
  auto b = make_kernel<double>(g, -2.0,
                               [](double tp, double t) { return t + 1; });
  auto lhs = star_product(f, a + b);
  auto rhs = star_product(f, a) + star_product(f, b);
  CHECK(sup_norm(lhs - rhs) <= 1e-14);
  auto l2 = star_product(f, 3.0 * a);
  auto r2 = 3.0 * star_product(f, a);
  CHECK(sup_norm(l2 - r2) <= 1e-14);
}

TEST_CASE("associativity holds to quadrature order") {
  auto defect = [](int n) {
    Grid g(0.0, 1.0, n);
    auto f = make_kernel<double>(
        g, 0.0, [](double tp, double t) { return std::sin(tp) + t; });
    auto k = make_kernel<double>(
        g, 0.0, [](double tp, double t) { return std::cos(t - tp); });
    auto m = make_kernel<double>(g, 0.0,
                                 [](double tp, double t) { return tp * tp; });
    auto lhs = star_product(star_product(f, k), m);
    auto rhs = star_product(f, star_product(k, m));
    return sup_norm(lhs - rhs);
  };
  double d1 = defect(101), d2 = defect(201);
  CHECK(d1 < 1e-4);
  CHECK(d2 < d1 / 3.0); // ~4x per h halving
}

TEST_CASE("lifted one-variable functions") {
  Grid g(0.0, 1.0, 201);
  OneVariableFunction<double> m(g.size());
  for (int k = 0; k < g.size(); ++k) m(k) = std::exp(g.node(k));
  auto L = lift_left(g, m);
  auto R = lift_right(g, m);
  CHECK(L.smooth()(200, 0) == doctest::Approx(std::exp(1.0)));
  CHECK(R.smooth()(200, 0) == doctest::Approx(1.0));
  CHECK(L.delta_coeff() == 0.0);
}

TEST_CASE("sandwich_ones against brute-force nested quadrature") {
  Grid g(0.0, 1.0, 101);
  auto F = make_kernel<cplx>(g, cplx(0.5, 0.25), [](double tp, double t) {
    return cplx(std::sin(tp), std::cos(2 * t));
  });
  auto S = sandwich_ones(F);
  // brute force: 1 * F first, then * 1
  auto ones = theta_kernel<cplx>(g);
  auto ref = star_product(star_product(ones, F), ones);
  CHECK(sup_norm(S - ref) <= 1e-12);
  CHECK(S.delta_coeff() == cplx(0.0));
}

TEST_CASE("integrate_left_edge") {
  Grid g(0.0, 1.0, 101);
  auto theta = theta_kernel<double>(g);
  auto v = integrate_left_edge(theta, 0);
  CHECK(v(100) == doctest::Approx(1.0).epsilon(1e-13)); // int_0^1 1 = 1
  auto one = GeneralizedKernel<double>::identity(g);
  auto w = integrate_left_edge(one, 0);
  CHECK(w(0) == 1.0); // delta contributes once, Theta(0)=1 convention
  CHECK(w(100) == 1.0);
}

TEST_CASE("sup_norm excludes the delta part") {
  Grid g(0.0, 1.0, 11);
  auto one = GeneralizedKernel<double>::identity(g);
  CHECK(sup_norm(one) == 0.0);
}

TEST_CASE("grid mismatch is rejected") {
  Grid g1(0.0, 1.0, 11), g2(0.0, 1.0, 21);
  auto a = GeneralizedKernel<double>::identity(g1);
  auto b = GeneralizedKernel<double>::identity(g2);
  CHECK_THROWS_AS(star_product(a, b), std::invalid_argument);
  CHECK_THROWS_AS(a + b, std::invalid_argument);
}
