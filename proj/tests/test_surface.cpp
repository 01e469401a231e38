#include <doctest.h>

#include <sstream>

#include "warpgeo/surface.hpp"

using namespace warpgeo;

namespace {

std::vector<double> ones(const DiscreteHypersurface& s) { return std::vector<double>(s.size(), 1.0); }

double ellipsoid_mean_curvature(double a, int n, double r) {
  const double w = a * a + 1.0 - r * r;
  return a / (n * std::sqrt(w)) * (n - 1 + 1.0 / w);
}

const RadialFunction kP2{"p2", 1.0, {{2, 0, 0.1}}};

}  // namespace

TEST_CASE("round sphere") {
  const auto euc = make_ambient("euclidean", 2);
  const double R = 1.5;
  const auto s = build_rotational(euc, MeridianCurve::circle(R), 256);
  CHECK(integrate(s, ones(s)) == doctest::Approx(4 * M_PI * R * R).epsilon(1e-10));
  const auto d = extrinsic_data(s);
  for (const auto& e : d.nodes) {
    CHECK(e.kappa(0) == doctest::Approx(1 / R).epsilon(1e-10));
    CHECK(e.kappa(1) == doctest::Approx(1 / R).epsilon(1e-10));
    CHECK(e.u == doctest::Approx(R).epsilon(1e-12));
  }
  const auto unit = build_rotational(euc, MeridianCurve::circle(1.0), 128);
  CHECK(integrate(unit, extrinsic_data(unit).mean_curvature(1)) == doctest::Approx(4 * M_PI).epsilon(1e-10));
  CHECK(umbilic_deficit(d).max < 1e-20);
  const auto gi = gradient_identity_check(s, d);
  CHECK(gi.eta_gradient <= 1e-8);
  CHECK(gi.u_gradient <= 1e-8);
  CHECK(gi.laplacian <= 1e-8);
  const auto f = hypothesis_flags(s, d, 2);
  CHECK(f.star_shaped);
  CHECK(f.k_convex);
  CHECK(f.strictly_convex);
  CHECK(f.grad_condition);
}

TEST_CASE("sphere area in higher dimensions") {
  for (int n : {3, 4, 5}) {
    const auto s = build_rotational(make_ambient("euclidean", n), MeridianCurve::circle(1.0), 64);
    const double exact = 2 * std::pow(M_PI, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0);
    CHECK(integrate(s, ones(s)) == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("slices are umbilic with kappa = lambda'/lambda") {
  for (const char* kind : {"sphere", "hyperbolic", "dss", "rn"}) {
    for (int n : {2, 3}) {
      const auto amb = make_ambient(kind, n);
      const double r0 = 1.1;
      const auto s = build_rotational(amb, MeridianCurve::slice(r0), 64);
      const auto d = extrinsic_data(s);
      const auto v = amb.eval(r0);
      const double area = std::pow(v.lambda, n) * 2 * std::pow(M_PI, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0);
      CHECK(integrate(s, ones(s)) == doctest::Approx(area).epsilon(1e-12));
      for (const auto& e : d.nodes) {
        for (int i = 0; i < n; ++i) CHECK(e.kappa(i) == doctest::Approx(v.dlambda / v.lambda).epsilon(1e-10));
        CHECK(e.u == doctest::Approx(v.lambda).epsilon(1e-12));
        CHECK(e.dr_tan.norm() < 1e-12);
      }
      CHECK(umbilic_deficit(d).max < 1e-20);
      const auto gi = gradient_identity_check(s, d);
      CHECK(gi.eta_gradient < 1e-12);
      CHECK(gi.u_gradient < 1e-12);
      // u - lambda'/H_1 integrates to zero on slices.
      const auto hk_gap = d.field([n](const NodeExtrinsic& e) { return e.u - e.profile.dlambda / (e.sigma(1) / n); });
      CHECK(std::abs(integrate(s, hk_gap)) < 1e-10);
      const auto r_field = d.field([](const NodeExtrinsic& e) { return e.r; });
      for (double g : scalar_gradient(s, d, r_field).norm) CHECK(g < 1e-14);
      const auto flags = hypothesis_flags(s, d, 2);
      CHECK(flags.grad_condition);
      CHECK(std::abs(flags.grad_margin) < 1e-10);
    }
  }
}

TEST_CASE("ellipsoid of revolution") {
  const auto euc = make_ambient("euclidean", 2);
  const auto s = build_rotational(euc, MeridianCurve::ellipse(2.0), 512);
  const auto d = extrinsic_data(s);
  const auto H = d.mean_curvature(1);
  double worst = 0.0, worst_closed = 0.0;
  for (int a = 0; a < s.size(); ++a) {
    worst = std::max(worst, std::abs(H[a] - ellipsoid_mean_curvature(2.0, 2, d.nodes[a].r)));
    worst_closed = std::max(worst_closed, (d.nodes[a].kappa - d.nodes[a].kappa_closed).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-6);
  CHECK(worst_closed <= 1e-6);
  const auto& grid = *s.meridian_grid();
  CHECK(grid.interpolate(H, 0.0, Reflection::even()) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(grid.interpolate(H, M_PI / 2, Reflection::even()) == doctest::Approx(5.0 / 8.0).epsilon(1e-6));
  const auto k1 = d.field([](const NodeExtrinsic& e) { return e.kappa(0); });
  const auto k2 = d.field([](const NodeExtrinsic& e) { return e.kappa(1); });
  CHECK(grid.interpolate(k1, M_PI / 2, Reflection::even()) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(grid.interpolate(k2, M_PI / 2, Reflection::even()) == doctest::Approx(1.0).epsilon(1e-6));
  const auto deficit = umbilic_deficit(d);
  CHECK(grid.interpolate(deficit.per_node, M_PI / 2, Reflection::even()) ==
        doctest::Approx(9.0 / 32.0).epsilon(1e-6));
  // Prolate spheroid area 2 pi (1 + a arcsin(e) / e).
  const double e = std::sqrt(1.0 - 0.25);
  CHECK(integrate(s, ones(s)) == doctest::Approx(2 * M_PI * (1 + 2.0 * std::asin(e) / e)).epsilon(1e-9));
  const auto flags = hypothesis_flags(s, d, 1);
  CHECK(flags.star_shaped);
  CHECK_FALSE(flags.grad_condition);
  CHECK(flags.grad_margin > 1e-3);
  CHECK(s.embedded());
}

TEST_CASE("rotational closed-form cross-check across the ellipsoid family and dimensions") {
  for (int n : {2, 3, 5}) {
    for (double a : {0.5, 2.0, 3.0}) {
      const auto s = build_rotational(make_ambient("euclidean", n), MeridianCurve::ellipse(a), 512);
      const auto d = extrinsic_data(s);
      double worst = 0.0;
      for (const auto& e : d.nodes) worst = std::max(worst, (e.kappa - e.kappa_closed).cwiseAbs().maxCoeff());
      CHECK(worst <= 1e-6);
    }
  }
  const auto s = build_rotational(make_ambient("dss", 2), MeridianCurve::perturbed_slice(1.2, 0.2, 2), 512);
  const auto d = extrinsic_data(s);
  double worst = 0.0;
  for (const auto& e : d.nodes) worst = std::max(worst, (e.kappa - e.kappa_closed).cwiseAbs().maxCoeff());
  CHECK(worst <= 1e-6);
}

TEST_CASE("extrinsic invariants") {
  const auto sph = make_ambient("sphere", 2);
  const RadialFunction rho{"bumpy", 1.0, {{2, 0, 0.1}, {3, 1, 0.02}, {1, -1, 0.05}}};
  const auto s = build_radial_graph(sph, rho, 32, 64);
  const auto d = extrinsic_data(s);
  const PolarChart chart(s.ambient());
  for (int a = 0; a < s.size(); ++a) {
    const auto& e = d.nodes[a];
    const Eigen::VectorXd g = chart.metric_diagonal(s.coords(a));
    CHECK(e.nu.dot(g.cwiseProduct(e.nu)) == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::MatrixXd t = s.tangents(a);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(e.nu.dot(g.cwiseProduct(t.col(i)))) < 1e-12);
    const Eigen::VectorXd tr = t.row(0).transpose();
    CHECK(tr.dot(e.g_inv * tr) + e.nu(0) * e.nu(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(e.u > 0.0);
    const double scale = std::max(1.0, e.h.norm() * e.g.norm());
    for (int i = 0; i < 2; ++i) CHECK(std::abs((e.h - e.kappa(i) * e.g).determinant()) <= 1e-9 * scale);
    CHECK(e.kappa(0) <= e.kappa(1));
  }
}

TEST_CASE("radial graphs") {
  const auto euc = make_ambient("euclidean", 2);
  SUBCASE("constant radius") {
    const auto s = build_radial_graph(euc, RadialFunction{"r", 1.3, {}}, 16, 32);
    const auto d = extrinsic_data(s);
    for (const auto& e : d.nodes) CHECK(e.u == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(integrate(s, ones(s)) == doctest::Approx(4 * M_PI * 1.69).epsilon(1e-12));
    const auto sph = make_ambient("sphere", 2);
    const auto s2 = build_radial_graph(sph, RadialFunction{"r", 1.3, {}}, 16, 32);
    for (const auto& e : extrinsic_data(s2).nodes) CHECK(e.u == doctest::Approx(std::sin(1.3)).epsilon(1e-12));
  }
  SUBCASE("area self-convergence") {
    const auto a1 = build_radial_graph(euc, kP2, 64, 128);
    const auto a2 = build_radial_graph(euc, kP2, 128, 256);
    CHECK(std::abs(integrate(a1, ones(a1)) - integrate(a2, ones(a2))) <= 1e-6);
  }
  SUBCASE("gradient of constants and of eta") {
    const auto s = build_radial_graph(euc, kP2, 32, 64);
    const auto d = extrinsic_data(s);
    for (double g : scalar_gradient(s, d, ones(s)).norm) CHECK(g == 0.0);
    const auto u = d.field([](const NodeExtrinsic& e) { return e.u; });
    CHECK(*std::min_element(u.begin(), u.end()) > 0.0);
  }
  SUBCASE("gradient identities converge") {
    std::vector<GradientIdentityResiduals> res;
    for (int n : {32, 64, 128}) {
      const auto s = build_radial_graph(euc, kP2, n / 2, n);
      res.push_back(gradient_identity_check(s, extrinsic_data(s)));
    }
    for (int i = 0; i + 1 < 3; ++i) {
      CHECK(res[i].eta_gradient / res[i + 1].eta_gradient >= 3.7);
      CHECK(res[i].u_gradient / res[i + 1].u_gradient >= 3.7);
      CHECK(res[i].laplacian / res[i + 1].laplacian >= 3.7);
    }
  }
}

TEST_CASE("construction errors") {
  const auto sph = make_ambient("sphere", 2);
  CHECK_THROWS_AS(build_rotational(sph, MeridianCurve::circle(4.0), 32), std::domain_error);
  CHECK_THROWS_AS(build_radial_graph(sph, RadialFunction{"big", 4.0, {}}, 8, 16), std::domain_error);
  const MeridianCurve skew{"skew", [](double t) {
                             return MeridianPoint{1.0 + 0.2 * t * (M_PI - t), 0.2 * (M_PI - 2 * t), -0.4, t, 1.0, 0.0};
                           }};
  CHECK_THROWS_AS(build_rotational(make_ambient("euclidean", 2), skew, 32), std::invalid_argument);
  const AmbientSpace flat_fiber(make_ambient("euclidean", 2).profile(), 2, 0.0, "flat-fiber");
  CHECK_THROWS_AS(build_rotational(flat_fiber, MeridianCurve::circle(1.0), 32), std::invalid_argument);
  CHECK_THROWS_AS(build_radial_graph(make_ambient("euclidean", 3), kP2, 8, 16), std::invalid_argument);
}

TEST_CASE("self-intersecting meridian is flagged") {
  // The polar angle backtracks while r oscillates, so the meridian crosses itself.
  const MeridianCurve loop{"loop", [](double t) {
                             MeridianPoint p;
                             p.r = 1.0 + 0.3 * std::cos(2 * t);
                             p.dr = -0.6 * std::sin(2 * t);
                             p.ddr = -1.2 * std::cos(2 * t);
                             p.theta = t + 0.8 * std::sin(2 * t);
                             p.dtheta = 1 + 1.6 * std::cos(2 * t);
                             p.ddtheta = -3.2 * std::sin(2 * t);
                             return p;
                           }};
  const auto s = build_rotational(make_ambient("euclidean", 2), loop, 64);
  CHECK_FALSE(s.embedded());
  CHECK(build_rotational(make_ambient("euclidean", 2), MeridianCurve::ellipse(3.0), 64).embedded());
}

TEST_CASE("node dump") {
  const auto s = build_rotational(make_ambient("euclidean", 2), MeridianCurve::circle(1.0), 8);
  std::ostringstream out;
  write_node_dump(out, s, extrinsic_data(s));
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    double v;
    int count = 0;
    while (fields >> v) ++count;
    CHECK(count == 7);
    ++lines;
  }
  CHECK(lines == 8);
}
