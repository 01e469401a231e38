#include <doctest.h>

#include <cmath>
#include <random>

#include "warpgeo/verify.hpp"

using namespace warpgeo;

namespace {

const RadialFunction kBumpy{"bumpy", 1.0, {{2, 0, 0.1}, {3, 1, 0.02}, {1, -1, 0.05}}};
const RadialFunction kConvex{"convex", 1.0, {{2, 0, 0.05}, {3, 2, 0.005}}};

}  // namespace

TEST_CASE("check result judging") {
  auto eq = make_check("x", 1e-5, 10.0, 1e-5);
  CHECK(eq.passed);
  CHECK(eq.normalized() == doctest::Approx(1e-6));
  CHECK_FALSE(make_check("x", -1e-3, 1.0, 1e-5).passed);
  CHECK(make_check("x", 0.5, 1.0, 1e-8, Comparison::NonNegative).passed);
  CHECK_FALSE(make_check("x", -1e-6, 1.0, 1e-8, Comparison::NonNegative).passed);
  // The floor keeps a zero scale from dividing by zero.
  CHECK(make_check("x", 0.0, 0.0, 1e-12).passed);
}

TEST_CASE("integral formula: round sphere in Euclidean space vanishes") {
  const auto s = build_rotational(make_ambient("euclidean", 2), MeridianCurve::circle(1.0), 64);
  const auto c = integral_formula_residual(s, 1);
  CHECK(std::abs(c.normalized()) <= 1e-12);
  CHECK(c.passed);
  const auto data = extrinsic_data(s);
  const auto t = integral_formula_terms(s, data, 1);
  for (std::size_t a = 0; a < t.newton.size(); ++a) {
    CHECK(std::abs(t.newton[a]) <= 1e-9);
    CHECK(std::abs(t.curvature[a]) == 0.0);
  }
}

TEST_CASE("integral formula: ellipsoid converges") {
  const auto euc = make_ambient("euclidean", 2);
  const auto study = convergence_study(
      [&](int N) { return integral_formula_residual(build_rotational(euc, MeridianCurve::ellipse(2.0), N), 1); },
      {64, 128, 256});
  CHECK(study.monotone);
  CHECK(study.order >= 1.9);
  CHECK(study.results.back().passed);
  REQUIRE(study.results.back().convergence_order);
}

TEST_CASE("integral formula: perturbed slice in de Sitter-Schwarzschild") {
  const auto dss = make_ambient("dss", 2);
  const auto coarse = build_rotational(dss, MeridianCurve::perturbed_slice(1.2, 0.2, 2), 256);
  const auto fine = build_rotational(dss, MeridianCurve::perturbed_slice(1.2, 0.2, 2), 512);
  for (int k : {1, 2}) {
    const auto a = integral_formula_residual(coarse, k);
    const auto b = integral_formula_residual(fine, k);
    CHECK(std::abs(a.normalized()) <= 1e-4);
    if (k == 1) CHECK(std::abs(a.normalized()) >= 4.0 * std::abs(b.normalized()));
  }
  // k = n: each term carries a factor that vanishes identically.
  CHECK(integral_formula_residual(coarse, 2).value == 0.0);
}

TEST_CASE("integral formula: k = 2 on a three-dimensional fiber") {
  const auto dss = make_ambient("dss", 3);
  const auto a = integral_formula_residual(build_rotational(dss, MeridianCurve::perturbed_slice(1.2, 0.2, 2), 128), 2);
  const auto b = integral_formula_residual(build_rotational(dss, MeridianCurve::perturbed_slice(1.2, 0.2, 2), 256), 2);
  CHECK(std::abs(b.normalized()) <= 1e-6);
  CHECK(std::abs(a.normalized()) >= 4.0 * std::abs(b.normalized()));
}

TEST_CASE("integral formula: graph in the sphere ambient") {
  const auto sph = make_ambient("sphere", 2);
  const auto g = build_radial_graph(sph, kBumpy, 64, 128);
  const auto data = extrinsic_data(g);
  const auto c = integral_formula_residual(g, data, 1);
  CHECK(std::abs(c.normalized()) <= 1e-4);
  CHECK(c.scale > 0.1);

  SUBCASE("Ricci assembly agrees with the curvature contraction") {
    const auto k1 = k1_formula_residual(g, data);
    CHECK(std::abs(k1.value - c.value) <= 1e-10 * c.scale);
    CHECK(k1.scale == doctest::Approx(c.scale).epsilon(1e-10));
  }
}

TEST_CASE("integral formula: k out of range") {
  const auto s = build_rotational(make_ambient("euclidean", 2), MeridianCurve::circle(1.0), 16);
  CHECK_THROWS_AS(integral_formula_residual(s, 0), std::out_of_range);
  CHECK_THROWS_AS(integral_formula_residual(s, 3), std::out_of_range);
}

TEST_CASE("k = 1 formula on slices") {
  for (const char* kind : {"sphere", "hyperbolic", "dss"}) {
    const auto s = build_rotational(make_ambient(kind, 2), MeridianCurve::slice(0.9), 32);
    const auto c = k1_formula_residual(s, extrinsic_data(s));
    CHECK(std::abs(c.value) <= 1e-12);
  }
  const auto e = build_rotational(make_ambient("euclidean", 2), MeridianCurve::ellipse(2.0), 256);
  CHECK(k1_formula_residual(e, extrinsic_data(e)).passed);
}

TEST_CASE("Ricci term identity") {
  SUBCASE("slice: both sides vanish") {
    const auto s = build_rotational(make_ambient("dss", 2), MeridianCurve::slice(1.0), 32);
    CHECK(ricci_term_identity(s, extrinsic_data(s)).value <= 1e-14);
  }
  SUBCASE("Euclidean: exact cancellation") {
    const auto s = build_rotational(make_ambient("euclidean", 3), MeridianCurve::ellipse(2.0), 64);
    CHECK(ricci_term_identity(s, extrinsic_data(s)).value <= 1e-12);
  }
  SUBCASE("graph in the sphere ambient") {
    const auto g = build_radial_graph(make_ambient("sphere", 2), kBumpy, 32, 64);
    const auto c = ricci_term_identity(g, extrinsic_data(g));
    CHECK(c.value <= 1e-8);
    CHECK(c.passed);
  }
}

TEST_CASE("Minkowski gap") {
  const auto euc = make_ambient("euclidean", 2);
  SUBCASE("unit sphere") {
    const auto s = build_rotational(euc, MeridianCurve::circle(1.0), 64);
    const auto c = minkowski_gap(s, extrinsic_data(s), 1);
    CHECK(std::abs(c.value) <= 1e-12);
    CHECK(c.applicable);
    CHECK(c.note == "equality");
  }
  SUBCASE("slices in every ambient") {
    for (const char* kind : {"sphere", "hyperbolic", "dss", "rn"}) {
      for (int n : {2, 3}) {
        const auto s = build_rotational(make_ambient(kind, n), MeridianCurve::slice(1.1), 32);
        const auto data = extrinsic_data(s);
        for (int k = 1; k <= n; ++k) CHECK(std::abs(minkowski_gap(s, data, k).normalized()) <= 1e-12);
      }
    }
  }
  SUBCASE("convex graph, k = 2") {
    const auto g = build_radial_graph(euc, kConvex, 128, 256);
    const auto data = extrinsic_data(g);
    REQUIRE(hypothesis_flags(g, data, 2).strictly_convex);
    const auto c = minkowski_gap(g, data, 2);
    CHECK(c.normalized() >= -1e-8);
    CHECK(c.passed);
  }
  SUBCASE("sphere ambient is outside the guarded scope") {
    const auto s = build_rotational(make_ambient("sphere", 2), MeridianCurve::slice(1.0), 32);
    CHECK_FALSE(minkowski_gap(s, extrinsic_data(s), 1).applicable);
  }
}

TEST_CASE("Heintze-Karcher gap") {
  const auto euc = make_ambient("euclidean", 2);
  SUBCASE("round sphere of radius R") {
    const auto s = build_rotational(euc, MeridianCurve::circle(1.7), 64);
    const auto c = heintze_karcher_gap(s, extrinsic_data(s));
    CHECK(std::abs(c.normalized()) <= 1e-12);
  }
  SUBCASE("off-center sphere") {
    const auto s = build_rotational(euc, MeridianCurve::offset_circle(1.0, 0.3), 256);
    CHECK(std::abs(heintze_karcher_gap(s, extrinsic_data(s)).normalized()) <= 1e-8);
  }
  SUBCASE("slice in the sphere ambient") {
    const auto s = build_rotational(make_ambient("sphere", 2), MeridianCurve::slice(0.8), 32);
    const auto data = extrinsic_data(s);
    const auto c = heintze_karcher_gap(s, data);
    CHECK(std::abs(c.normalized()) <= 1e-12);
    double u_int = 0.0;
    for (int a = 0; a < s.size(); ++a) u_int += s.weights()[a] * data.nodes[a].u;
    CHECK(u_int == doctest::Approx(std::sin(0.8) * 4.0 * M_PI * std::sin(0.8) * std::sin(0.8)).epsilon(1e-12));
  }
  SUBCASE("ellipsoid: strict and stable") {
    const auto a = build_rotational(euc, MeridianCurve::ellipse(2.0), 128);
    const auto b = build_rotational(euc, MeridianCurve::ellipse(2.0), 256);
    const auto ca = heintze_karcher_gap(a, extrinsic_data(a));
    const auto cb = heintze_karcher_gap(b, extrinsic_data(b));
    CHECK(cb.normalized() > 1e-2);
    CHECK(cb.passed);
    CHECK(ca.normalized() == doctest::Approx(cb.normalized()).epsilon(1e-6));
    CHECK(cb.note == "strict");
  }
  SUBCASE("refuses non mean-convex surfaces") {
    const auto s = build_rotational(euc, MeridianCurve::perturbed_slice(1.0, 0.2, 6), 64);
    CHECK_THROWS_AS(heintze_karcher_gap(s, extrinsic_data(s)), std::domain_error);
  }
}

TEST_CASE("slice equation solver") {
  const auto euc = make_ambient("euclidean", 3);
  SUBCASE("lambda' condition: r0 = 1 for random (k, alpha)") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> kd(1, 3);
    std::uniform_real_distribution<double> ad(0.0, 3.0);
    int done = 0;
    while (done < 10) {
      const int k = kd(rng);
      const double alpha = 1.0 / k + ad(rng);
      if (std::abs(k * alpha - 1.0) < 1e-3) continue;
      const auto sol = slice_equation_solve(euc, SliceCondition::HkAlphaLambdaPrime, k, alpha);
      REQUIRE(sol.roots.size() == 1);
      CHECK(std::abs(sol.roots[0] - 1.0) <= 1e-10);
      CHECK(sol.pointwise_residual[0] <= 1e-10);
      ++done;
    }
  }
  SUBCASE("H^-alpha = u: the unit sphere") {
    const auto sol = slice_equation_solve(euc, SliceCondition::HAlpha, 1, 2.0);
    REQUIRE(sol.roots.size() == 1);
    CHECK(sol.roots[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("k alpha = 1 is a degenerate family") {
    const auto sol = slice_equation_solve(euc, SliceCondition::HkAlphaLambdaPrime, 2, 0.5);
    CHECK(sol.degenerate);
    CHECK(sol.roots.empty());
  }
  SUBCASE("parameter errors") {
    CHECK_THROWS_AS(slice_equation_solve(euc, SliceCondition::HkAlpha, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(slice_equation_solve(euc, SliceCondition::HkAlphaLambdaPrime, 2, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(slice_equation_solve(euc, SliceCondition::HkAlpha, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(parse_slice_condition("nope"), std::invalid_argument);
  }
  SUBCASE("roots in a curved ambient satisfy the equation") {
    const auto sph = make_ambient("sphere", 2);
    const auto sol = slice_equation_solve(sph, SliceCondition::HkAlpha, 2, 1.0);
    REQUIRE_FALSE(sol.roots.empty());
    for (std::size_t i = 0; i < sol.roots.size(); ++i) {
      CHECK(std::abs(slice_equation(sph, SliceCondition::HkAlpha, 2, 1.0, sol.roots[i])) <= 1e-12);
      CHECK(sol.pointwise_residual[i] <= 1e-10);
    }
  }
}

TEST_CASE("theorem checks") {
  SUBCASE("slice in de Sitter-Schwarzschild, nablaHk with k = 2") {
    const auto s = build_rotational(make_ambient("dss", 3), MeridianCurve::slice(1.0), 32);
    TheoremOptions opt;
    opt.k = 2;
    const auto rep = theorem_check(s, extrinsic_data(s), Theorem::NablaHk, opt);
    CHECK(rep.hypotheses_hold);
    CHECK(rep.conclusion_holds);
    CHECK(rep.conclusion_margin <= 1e-10);
    CHECK(rep.consistent());
  }
  SUBCASE("ellipsoid, corHphi: Phi is increasing") {
    const auto s = build_rotational(make_ambient("euclidean", 2), MeridianCurve::ellipse(2.0), 128);
    const auto data = extrinsic_data(s);
    TheoremOptions opt;
    opt.phi = [](double r) { return ellipsoid_mean_curvature(2.0, 2, r); };
    const auto rep = theorem_check(s, data, Theorem::CorHphi, opt);
    CHECK_FALSE(rep.hypotheses_hold);
    CHECK_FALSE(rep.conclusion_holds);
    CHECK(rep.consistent());
    bool flagged = false;
    for (const auto& h : rep.hypotheses) flagged |= (h.name == "Phi_nonincreasing" && !h.holds);
    CHECK(flagged);
    // Without an explicit Phi the monotonicity is read off the nodes.
    const auto auto_rep = theorem_check(s, data, Theorem::CorHphi, TheoremOptions{});
    CHECK_FALSE(auto_rep.hypotheses_hold);
  }
  SUBCASE("unit sphere, corHalph with alpha = 2") {
    const auto s = build_rotational(make_ambient("euclidean", 2), MeridianCurve::circle(1.0), 64);
    TheoremOptions opt;
    opt.alpha = 2.0;
    const auto rep = theorem_check(s, extrinsic_data(s), Theorem::CorHalph, opt);
    CHECK(rep.hypotheses_hold);
    CHECK(rep.conclusion == "slice");
    CHECK(rep.conclusion_holds);
  }
  SUBCASE("off-center sphere, nablaH: umbilic but not a slice") {
    const auto s = build_rotational(make_ambient("euclidean", 2), MeridianCurve::offset_circle(1.0, 0.3), 128);
    const auto rep = theorem_check(s, extrinsic_data(s), Theorem::NablaH, TheoremOptions{});
    CHECK(rep.hypotheses_hold);
    CHECK(rep.conclusion_holds);
    CHECK_FALSE(is_slice(s));
  }
  SUBCASE("parameter mismatch") {
    const auto s = build_rotational(make_ambient("dss", 3), MeridianCurve::slice(1.0), 16);
    const auto data = extrinsic_data(s);
    TheoremOptions opt;
    opt.k = 0;
    CHECK_THROWS_AS(theorem_check(s, data, Theorem::NablaHk, opt), std::invalid_argument);
    opt.k = 3;
    CHECK_THROWS_AS(theorem_check(s, data, Theorem::CorHkconst, opt), std::invalid_argument);
    opt.k = 1;
    opt.alpha = -1.0;
    CHECK_THROWS_AS(theorem_check(s, data, Theorem::Hklambda, opt), std::invalid_argument);
    CHECK_THROWS_AS(parse_theorem("nablaX"), std::invalid_argument);
    CHECK(parse_theorem("corHkconst") == Theorem::CorHkconst);
  }
}

TEST_CASE("ellipsoid counterexample") {
  const auto rep = ellipsoid_counterexample(2.0, 2, 512);
  CHECK(rep.closed_form_error <= 1e-6);
  CHECK(rep.pole_h == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rep.equator_h == doctest::Approx(5.0 / 8.0).epsilon(1e-6));
  CHECK(rep.equator_kappa(0) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(rep.equator_kappa(1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.equator_deficit == doctest::Approx(9.0 / 32.0).epsilon(1e-6));
  CHECK(rep.phi_increasing);
  CHECK(rep.min_phi_derivative > 0.0);
  CHECK(rep.min_interior_deficit > 0.0);
  CHECK(rep.star_shaped);
  CHECK_FALSE(rep.cor_hphi.hypotheses_hold);

  const auto flat = ellipsoid_counterexample(0.5, 2, 64);
  CHECK_FALSE(flat.note.empty());
  CHECK_THROWS_AS(ellipsoid_counterexample(2.0, 1, 64), std::invalid_argument);
  CHECK(ellipsoid_mean_curvature_derivative(2.0, 3, 1.5) ==
        doctest::Approx((ellipsoid_mean_curvature(2.0, 3, 1.5 + 1e-6) - ellipsoid_mean_curvature(2.0, 3, 1.5 - 1e-6)) / 2e-6)
            .epsilon(1e-6));
}

TEST_CASE("convergence study bookkeeping") {
  auto fake = [](std::vector<double> errs) {
    return [errs](int N) {
      const std::size_t i = N == 16 ? 0 : N == 32 ? 1 : 2;
      return make_check("fake", errs[i], 1.0, 1e-3);
    };
  };
  const auto s2 = convergence_study(fake({4e-2, 1e-2, 2.5e-3}), {16, 32, 64});
  CHECK(s2.order == doctest::Approx(2.0));
  CHECK(*s2.results.back().convergence_order == doctest::Approx(2.0));

  const auto flat = convergence_study(fake({1e-16, 0.0, 2e-16}), {16, 32, 64});
  CHECK(flat.saturated);
  CHECK(std::isnan(flat.order));

  const auto bad = convergence_study(fake({1e-3, 2e-3, 1e-4}), {16, 32, 64});
  CHECK_FALSE(bad.monotone);
  CHECK(std::isnan(bad.order));

  CHECK_THROWS_AS(convergence_study(fake({1, 1, 1}), {16, 32}), std::invalid_argument);

  const auto slices = convergence_study(
      [](int N) {
        return integral_formula_residual(build_rotational(make_ambient("dss", 2), MeridianCurve::slice(1.0), N), 1);
      },
      {16, 32, 64});
  CHECK(slices.saturated);
}
