#include "warpgeo/verify.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace warpgeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double abs_integral(const DiscreteHypersurface& surf, const std::vector<double>& f) {
  std::vector<double> g(f.size());
  std::transform(f.begin(), f.end(), g.begin(), [](double v) { return std::abs(v); });
  return integrate(surf, g);
}

double max_r(const DiscreteHypersurface& surf) {
  double m = 0.0;
  for (int a = 0; a < surf.size(); ++a) m = std::max(m, surf.r(a));
  return m;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void require_k(int k, int lo, int hi, const char* what) {
  if (k < lo || k > hi) {
    throw std::invalid_argument(std::string(what) + ": k = " + std::to_string(k) + " outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// CheckResult

double CheckResult::normalized() const { return value / std::max(scale, kFloor); }

void CheckResult::judge() {
  const double v = normalized();
  passed = comparison == Comparison::Equality ? std::abs(v) <= tolerance : v >= -tolerance;
}

CheckResult make_check(std::string name, double value, double scale, double tolerance,
                       Comparison comparison) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.scale = scale;
  c.tolerance = tolerance;
  c.comparison = comparison;
  c.judge();
  return c;
}

// ---------------------------------------------------------------------------
// Integral formula

IntegralFormulaTerms integral_formula_terms(const DiscreteHypersurface& surf,
                                            const ExtrinsicData& data, int k) {
  const int n = data.n;
  if (k < 1 || k > n) throw std::out_of_range("integral formula: k outside [1, n]");
  const AmbientSpace& amb = surf.ambient();
  const PolarChart chart(amb);

  const auto sk = data.field([k](const NodeExtrinsic& e) { return e.sigma(k); });
  const auto grad = scalar_gradient(surf, data, sk);

  IntegralFormulaTerms t;
  t.gradient.resize(surf.size());
  t.newton.resize(surf.size());
  t.curvature.resize(surf.size());
  t.magnitude.resize(surf.size());
  std::vector<TangentDecomposition> frame(n);
  for (int a = 0; a < surf.size(); ++a) {
    const auto& e = data.nodes[a];
    const double lambda = e.profile.lambda;
    t.gradient[a] = -(n - k) * lambda * grad.along_dr[a];
    const double next = k + 1 <= n ? e.sigma(k + 1) : 0.0;
    t.newton[a] = ((n - k) * e.sigma(1) * e.sigma(k) - n * (k + 1) * next) * e.u;
    double mag = std::abs(t.gradient[a]) +
                 ((n - k) * std::abs(e.sigma(1) * e.sigma(k)) + n * (k + 1) * std::abs(next)) *
                     std::abs(e.u);

    const Eigen::VectorXd x = surf.coords(a);
    for (int j = 0; j < n; ++j) frame[j] = chart.decompose(x, e.principal_dirs.col(j));
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double radial = lambda * e.principal_dirs(0, j);
      if (radial == 0.0) continue;
      for (int p = 0; p < n; ++p) {
        if (p == j) continue;
        const double trunc = sigma_truncated(e.kappa, k - 1, {j, p});
        if (trunc == 0.0) continue;
        const double term = amb.riemann(e.r, e.nu_split, frame[p], frame[j], frame[p]) * radial * trunc;
        sum += term;
        mag += n * std::abs(term);
      }
    }
    t.curvature[a] = -n * sum;
    t.magnitude[a] = mag;
  }
  return t;
}

CheckResult integral_formula_residual(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                      int k, double tolerance) {
  const auto t = integral_formula_terms(surf, data, k);
  std::vector<double> total(t.gradient.size());
  for (std::size_t a = 0; a < total.size(); ++a) total[a] = t.gradient[a] + t.newton[a] + t.curvature[a];
  return make_check("integral_formula", integrate(surf, total), integrate(surf, t.magnitude), tolerance);
}

CheckResult integral_formula_residual(const DiscreteHypersurface& surf, int k, double tolerance) {
  return integral_formula_residual(surf, extrinsic_data(surf), k, tolerance);
}

CheckResult k1_formula_residual(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                double tolerance) {
  const int n = data.n;
  const AmbientSpace& amb = surf.ambient();
  const PolarChart chart(amb);
  const auto h = data.mean_curvature(1);
  const auto grad = scalar_gradient(surf, data, h);

  std::vector<double> total(surf.size()), mag(surf.size());
  for (int a = 0; a < surf.size(); ++a) {
    const auto& e = data.nodes[a];
    const double lambda = e.profile.lambda;
    const double t1 = -n * (n - 1) * lambda * grad.along_dr[a];
    const double s1 = e.sigma(1);
    const double t2 = ((n - 1) * s1 * s1 - 2.0 * n * e.sigma(2)) * e.u;
    const double t2_mag = ((n - 1) * s1 * s1 + 2.0 * n * std::abs(e.sigma(2))) * std::abs(e.u);
    const Eigen::VectorXd tangential = lambda * (surf.tangents(a) * e.dr_tan);
    const double t3 =
        -n * amb.ricci(e.r, e.nu_split, chart.decompose(surf.coords(a), tangential));
    total[a] = t1 + t2 + t3;
    mag[a] = std::abs(t1) + t2_mag + std::abs(t3);
  }
  return make_check("k1_formula", integrate(surf, total), integrate(surf, mag), tolerance);
}

CheckResult ricci_term_identity(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                double tolerance) {
  const int n = data.n;
  const AmbientSpace& amb = surf.ambient();
  const PolarChart chart(amb);
  double worst = 0.0;
  double scale = 0.0;
  for (int a = 0; a < surf.size(); ++a) {
    const auto& e = data.nodes[a];
    const auto [lambda, dl, ddl] = e.profile;
    const Eigen::VectorXd tangential = lambda * (surf.tangents(a) * e.dr_tan);
    const double lhs = amb.ricci(e.r, e.nu_split, chart.decompose(surf.coords(a), tangential));
    const double fiber_sq = e.nu_split.fiber.squaredNorm();
    const double rhs = -e.u * (n - 1) * (amb.epsilon() + lambda * ddl - dl * dl) * fiber_sq;
    worst = std::max(worst, std::abs(lhs - rhs));
    scale = std::max(scale, std::max(std::abs(lhs), std::abs(rhs)));
  }
  // Absolute residual; the scale is reported for context only.
  auto c = make_check("ricci_term", worst, 1.0, tolerance);
  std::ostringstream note;
  note << "max |side| = " << scale;
  c.note = note.str();
  return c;
}

// ---------------------------------------------------------------------------
// Inequalities

ConditionReport ambient_conditions(const AmbientSpace& ambient, double surface_r_max) {
  const double r_bar = ambient.profile().r_max();
  const double hi = std::isfinite(r_bar) ? r_bar : std::max(10.0, 2.0 * surface_r_max);
  constexpr int samples = 256;
  std::vector<double> grid(samples);
  for (int i = 0; i < samples; ++i) grid[i] = hi * (i + 0.5) / samples;
  return ambient.check_conditions(grid);
}

namespace {

bool gap_conditions(const ConditionReport& c) { return (c.c1 || c.cone_point) && c.c2 && c.c3 && c.c4_weak; }

void annotate_gap(CheckResult& c) {
  std::ostringstream note;
  if (!c.applicable) note << "hypotheses not met; ";
  note << (std::abs(c.normalized()) <= c.tolerance ? "equality" : "strict");
  c.note = note.str();
}

}  // namespace

CheckResult minkowski_gap(const DiscreteHypersurface& surf, const ExtrinsicData& data, int k,
                          double tolerance) {
  const int n = data.n;
  require_k(k, 1, n, "minkowski_gap");
  const auto hk = data.mean_curvature(k);
  const auto hk1 = data.mean_curvature(k - 1);
  std::vector<double> left(surf.size()), right(surf.size());
  bool star = true;
  for (int a = 0; a < surf.size(); ++a) {
    left[a] = hk[a] * data.nodes[a].u;
    right[a] = hk1[a] * data.nodes[a].profile.dlambda;
    star = star && data.nodes[a].nu(0) > 0.0;
  }
  const double gap = integrate(surf, left) - integrate(surf, right);
  auto c = make_check("minkowski", gap, abs_integral(surf, left) + abs_integral(surf, right),
                      tolerance, Comparison::NonNegative);
  c.applicable = star && gap_conditions(ambient_conditions(surf.ambient(), max_r(surf)));
  annotate_gap(c);
  return c;
}

CheckResult heintze_karcher_gap(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                double tolerance) {
  const auto h = data.mean_curvature(1);
  std::vector<double> left(surf.size()), right(surf.size());
  for (int a = 0; a < surf.size(); ++a) {
    if (!(h[a] > 0.0)) {
      throw std::domain_error("Heintze-Karcher gap needs H_1 > 0; H_1 = " + std::to_string(h[a]) +
                              " at node " + std::to_string(a));
    }
    left[a] = data.nodes[a].profile.dlambda / h[a];
    right[a] = data.nodes[a].u;
  }
  const double gap = integrate(surf, left) - integrate(surf, right);
  auto c = make_check("heintze_karcher", gap, abs_integral(surf, left) + abs_integral(surf, right),
                      tolerance, Comparison::NonNegative);
  c.applicable = surf.embedded() && gap_conditions(ambient_conditions(surf.ambient(), max_r(surf)));
  annotate_gap(c);
  return c;
}

// ---------------------------------------------------------------------------
// Slice equations

std::string to_string(SliceCondition c) {
  switch (c) {
    case SliceCondition::HAlpha: return "H_alpha";
    case SliceCondition::HkAlpha: return "Hk_alpha";
    case SliceCondition::HkAlphaLambdaPrime: return "Hk_alpha_lambdaprime";
  }
  return "?";
}

SliceCondition parse_slice_condition(const std::string& name) {
  if (name == "H_alpha") return SliceCondition::HAlpha;
  if (name == "Hk_alpha") return SliceCondition::HkAlpha;
  if (name == "Hk_alpha_lambdaprime" || name == "Hklambda") return SliceCondition::HkAlphaLambdaPrime;
  throw std::invalid_argument("unknown slice condition '" + name + "'");
}

double slice_equation(const AmbientSpace& ambient, SliceCondition condition, int k, double alpha,
                      double r) {
  const auto [lambda, dl, ddl] = ambient.eval(r);
  (void)ddl;
  const int power = condition == SliceCondition::HAlpha ? 1 : k;
  const double factor = condition == SliceCondition::HkAlphaLambdaPrime ? dl : 1.0;
  return std::pow(dl / lambda, -power * alpha) * factor - lambda;
}

SliceSolution slice_equation_solve(const AmbientSpace& ambient, SliceCondition condition, int k,
                                   double alpha, int verify_nodes) {
  const int n = ambient.n();
  if (!(alpha > 0.0)) throw std::invalid_argument("slice equation: alpha must be positive");
  if (condition == SliceCondition::HAlpha) k = 1;
  require_k(k, 1, n, "slice equation");
  if (condition == SliceCondition::HkAlphaLambdaPrime && alpha * k < 1.0 - 1e-12) {
    throw std::invalid_argument("slice equation: the lambda' condition needs alpha >= 1/k");
  }

  const double r_bar = ambient.profile().r_max();
  const double hi = std::isfinite(r_bar) ? r_bar * (1.0 - 1e-6) : 100.0;
  const double lo = std::min(1e-6, 1e-6 * hi);
  constexpr int samples = 4000;

  auto f = [&](double r) { return slice_equation(ambient, condition, k, alpha, r); };
  auto admissible = [&](double r) { return ambient.eval(r).dlambda > 0.0; };

  SliceSolution sol;
  bool degenerate = true;
  int used = 0;
  double r_prev = 0.0, f_prev = 0.0;
  bool have_prev = false;
  for (int i = 0; i < samples; ++i) {
    const double r = lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
    if (!admissible(r)) {
      have_prev = false;
      continue;
    }
    const double v = f(r);
    const double scale = 1.0 + ambient.eval(r).lambda;
    ++used;
    if (std::abs(v) > 1e-12 * scale) degenerate = false;
    if (v == 0.0) {
      sol.roots.push_back(r);
    } else if (have_prev && f_prev != 0.0 && (f_prev < 0.0) != (v < 0.0)) {
      boost::math::tools::eps_tolerance<double> tol(52);
      std::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(f, r_prev, r, f_prev, v, tol, iters);
      sol.roots.push_back(0.5 * (a + b));
    }
    r_prev = r;
    f_prev = v;
    have_prev = true;
  }
  sol.degenerate = used > 0 && degenerate;
  if (sol.degenerate) {
    sol.roots.clear();
    sol.message = "equation holds identically: every slice with lambda' > 0 is a solution";
    return sol;
  }
  if (sol.roots.empty()) {
    sol.message = "no root in (0, r_max) with lambda' > 0";
    return sol;
  }

  for (double r0 : sol.roots) {
    if (ambient.epsilon() != 1.0) {
      sol.pointwise_residual.push_back(kNaN);
      continue;
    }
    const auto surf = build_rotational(ambient, MeridianCurve::slice(r0), verify_nodes);
    const auto data = extrinsic_data(surf);
    const auto hk = data.mean_curvature(k);
    double worst = 0.0;
    for (int a = 0; a < surf.size(); ++a) {
      const auto& e = data.nodes[a];
      const double factor = condition == SliceCondition::HkAlphaLambdaPrime ? e.profile.dlambda : 1.0;
      worst = std::max(worst, std::abs(std::pow(hk[a], -alpha) * factor - e.u) / std::abs(e.u));
    }
    sol.pointwise_residual.push_back(worst);
  }
  std::ostringstream msg;
  msg << sol.roots.size() << " root(s)";
  sol.message = msg.str();
  return sol;
}

// ---------------------------------------------------------------------------
// Theorem checks

std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::NablaH: return "nablaH";
    case Theorem::NablaHk: return "nablaHk";
    case Theorem::CorHphi: return "corHphi";
    case Theorem::CorHkphi: return "corHkphi";
    case Theorem::CorHalph: return "corHalph";
    case Theorem::CorHkalph: return "corHkalph";
    case Theorem::CorHkconst: return "corHkconst";
    case Theorem::Hklambda: return "Hklambda";
  }
  return "?";
}

Theorem parse_theorem(const std::string& name) {
  for (Theorem t : {Theorem::NablaH, Theorem::NablaHk, Theorem::CorHphi, Theorem::CorHkphi,
                    Theorem::CorHalph, Theorem::CorHkalph, Theorem::CorHkconst, Theorem::Hklambda}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown theorem '" + name + "'");
}

bool is_slice(const DiscreteHypersurface& surf, double* spread) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int a = 0; a < surf.size(); ++a) {
    lo = std::min(lo, surf.r(a));
    hi = std::max(hi, surf.r(a));
  }
  if (spread) *spread = hi - lo;
  return hi - lo <= 1e-8 * (1.0 + std::abs(hi));
}

namespace {

// H_k is a non-increasing function of r across the nodes: nodes at equal r agree, and H_k
// never rises as r grows. Returns the largest violation (<= 0 when it holds).
double monotone_violation(const std::vector<double>& r, const std::vector<double>& hk) {
  std::vector<int> order(r.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return r[a] < r[b]; });
  const double r_tol = 1e-10 * (1.0 + max_abs(r));
  double running_min = std::numeric_limits<double>::infinity();
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double g_lo = hk[order[i]], g_hi = hk[order[i]];
    while (j + 1 < order.size() && r[order[j + 1]] - r[order[i]] <= r_tol) {
      ++j;
      g_lo = std::min(g_lo, hk[order[j]]);
      g_hi = std::max(g_hi, hk[order[j]]);
    }
    worst = std::max(worst, g_hi - g_lo);
    if (std::isfinite(running_min)) worst = std::max(worst, g_hi - running_min);
    running_min = std::min(running_min, g_lo);
    i = j + 1;
  }
  return std::isfinite(worst) ? worst : 0.0;
}

}  // namespace

TheoremReport theorem_check(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                            Theorem theorem, const TheoremOptions& opt) {
  const int n = data.n;
  int k = opt.k;
  switch (theorem) {
    case Theorem::NablaH:
    case Theorem::CorHphi:
    case Theorem::CorHalph:
      k = 1;
      break;
    case Theorem::NablaHk:
    case Theorem::CorHkphi:
    case Theorem::CorHkalph:
    case Theorem::CorHkconst:
      require_k(k, 2, n - 1, to_string(theorem).c_str());
      break;
    case Theorem::Hklambda:
      require_k(k, 1, n, "Hklambda");
      break;
  }
  const bool uses_alpha = theorem == Theorem::CorHalph || theorem == Theorem::CorHkalph ||
                          theorem == Theorem::Hklambda;
  if (uses_alpha && !(opt.alpha > 0.0)) {
    throw std::invalid_argument(to_string(theorem) + ": alpha must be positive");
  }

  TheoremReport rep;
  rep.theorem = theorem;
  auto add = [&](std::string name, bool holds, double margin) {
    rep.hypotheses.push_back({std::move(name), holds, margin});
  };

  const auto cond = ambient_conditions(surf.ambient(), max_r(surf));
  const auto flags = hypothesis_flags(surf, data, k);
  const auto hk = data.mean_curvature(k);
  const double hk_scale = std::max(1.0, max_abs(hk));
  const std::vector<double> r = data.field([](const NodeExtrinsic& e) { return e.r; });
  const std::vector<double> u = data.field([](const NodeExtrinsic& e) { return e.u; });

  // Ambient hypotheses.
  switch (theorem) {
    case Theorem::NablaH:
    case Theorem::CorHphi:
    case Theorem::CorHalph:
      add("ricci_fiber", cond.ricci_fiber, cond.ricci_fiber_margin);
      break;
    case Theorem::NablaHk:
    case Theorem::CorHkphi:
    case Theorem::CorHkalph:
      add("c4_weak", cond.c4_weak, cond.c4_margin);
      break;
    case Theorem::CorHkconst:
      add("c4", cond.c4, cond.c4_margin);
      break;
    case Theorem::Hklambda:
      add("c1", cond.c1 || cond.cone_point, cond.c1_margin);
      add("c2", cond.c2, cond.c2_margin);
      add("c3", cond.c3, cond.c3_margin);
      add("c4", cond.c4, cond.c4_margin);
      break;
  }

  // Shape hypotheses.
  const bool needs_star = theorem == Theorem::NablaH || theorem == Theorem::NablaHk ||
                          theorem == Theorem::CorHphi || theorem == Theorem::CorHkphi ||
                          theorem == Theorem::CorHkconst;
  if (needs_star) add("star_shaped", flags.star_shaped, flags.star_margin);
  if (theorem == Theorem::NablaHk || theorem == Theorem::CorHkphi || theorem == Theorem::CorHkconst) {
    add("k_convex", flags.k_convex, flags.k_convex_margin);
  }
  if (theorem == Theorem::CorHalph || theorem == Theorem::CorHkalph) {
    add("strictly_convex", flags.strictly_convex, flags.convex_margin);
  }
  if (theorem == Theorem::Hklambda) {
    add("embedded", surf.embedded(), surf.embedded() ? 1.0 : -1.0);
    const double hmin = *std::min_element(hk.begin(), hk.end());
    add("Hk_positive", hmin > 0.0, hmin);
    add("alpha_ge_1_over_k", opt.alpha * k >= 1.0 - 1e-12, opt.alpha - 1.0 / k);
  }

  // Curvature conditions.
  const double cond_tol = opt.condition_tol * hk_scale;
  switch (theorem) {
    case Theorem::NablaH:
    case Theorem::NablaHk:
      add("grad_Hk_dr_nonpositive", flags.grad_margin <= cond_tol, -flags.grad_margin);
      break;
    case Theorem::CorHphi:
    case Theorem::CorHkphi: {
      if (opt.phi) {
        double resid = 0.0;
        for (std::size_t a = 0; a < r.size(); ++a) resid = std::max(resid, std::abs(hk[a] - opt.phi(r[a])));
        add("Hk_equals_Phi", resid <= cond_tol, -resid);
        const double lo = *std::min_element(r.begin(), r.end());
        const double hi = *std::max_element(r.begin(), r.end());
        constexpr int samples = 200;
        double rise = -std::numeric_limits<double>::infinity();
        double pmin = std::numeric_limits<double>::infinity();
        double prev = opt.phi(lo);
        pmin = prev;
        for (int i = 1; i <= samples; ++i) {
          const double v = opt.phi(lo + (hi - lo) * i / samples);
          rise = std::max(rise, v - prev);
          pmin = std::min(pmin, v);
          prev = v;
        }
        if (!std::isfinite(rise)) rise = 0.0;
        add("Phi_positive", pmin > 0.0, pmin);
        add("Phi_nonincreasing", rise <= 0.0, -rise);
      } else {
        const double viol = monotone_violation(r, hk);
        const double hmin = *std::min_element(hk.begin(), hk.end());
        add("Phi_positive", hmin > 0.0, hmin);
        add("Hk_nonincreasing_in_r", viol <= cond_tol, -viol);
      }
      break;
    }
    case Theorem::CorHalph:
    case Theorem::CorHkalph:
    case Theorem::Hklambda: {
      const double umax = std::max(1e-300, max_abs(u));
      double resid = 0.0;
      for (std::size_t a = 0; a < hk.size(); ++a) {
        const double factor = theorem == Theorem::Hklambda ? data.nodes[a].profile.dlambda : 1.0;
        const double lhs = hk[a] > 0.0 ? std::pow(hk[a], -opt.alpha) * factor
                                       : std::numeric_limits<double>::infinity();
        resid = std::max(resid, std::abs(lhs - u[a]) / umax);
      }
      add("Hk_power_equation", resid <= opt.condition_tol, -resid);
      break;
    }
    case Theorem::CorHkconst: {
      const auto [mn, mx] = std::minmax_element(hk.begin(), hk.end());
      add("Hk_constant", *mx - *mn <= cond_tol, -(*mx - *mn));
      break;
    }
  }

  rep.hypotheses_hold = std::all_of(rep.hypotheses.begin(), rep.hypotheses.end(),
                                    [](const Hypothesis& h) { return h.holds; });

  const bool umbilic_conclusion = theorem == Theorem::NablaH || theorem == Theorem::NablaHk ||
                                  theorem == Theorem::CorHphi || theorem == Theorem::CorHkphi;
  if (umbilic_conclusion) {
    rep.conclusion = "umbilic";
    double deficit = umbilic_deficit(data).max;
    if (!data.nodes.empty() && data.nodes.front().kappa_closed.size() == n) {
      ExtrinsicData closed;
      closed.n = n;
      closed.nodes.resize(data.nodes.size());
      for (std::size_t a = 0; a < data.nodes.size(); ++a) closed.nodes[a].kappa = data.nodes[a].kappa_closed;
      deficit = umbilic_deficit(closed).max;
    }
    rep.conclusion_margin = deficit;
    rep.conclusion_holds = deficit <= opt.umbilic_tol;
  } else {
    rep.conclusion = "slice";
    double spread = 0.0;
    rep.conclusion_holds = is_slice(surf, &spread);
    rep.conclusion_margin = spread;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Ellipsoid

double ellipsoid_mean_curvature(double a, int n, double r) {
  const double w = a * a + 1.0 - r * r;
  return a / (n * std::sqrt(w)) * (n - 1 + 1.0 / w);
}

double ellipsoid_mean_curvature_derivative(double a, int n, double r) {
  const double w = a * a + 1.0 - r * r;
  return a / n * r * ((n - 1) * std::pow(w, -1.5) + 3.0 * std::pow(w, -2.5));
}

EllipsoidReport ellipsoid_counterexample(double a, int n, int n_s) {
  if (n < 2) throw std::invalid_argument("ellipsoid: n must be at least 2");
  if (!(a > 0.0)) throw std::invalid_argument("ellipsoid: a must be positive");
  EllipsoidReport rep;
  rep.a = a;
  rep.n = n;
  rep.nodes = n_s;

  const auto amb = make_ambient("euclidean", n);
  const auto surf = build_rotational(amb, MeridianCurve::ellipse(a), n_s);
  const auto data = extrinsic_data(surf);
  const auto h = data.mean_curvature(1);
  for (int j = 0; j < surf.size(); ++j) {
    rep.closed_form_error =
        std::max(rep.closed_form_error, std::abs(h[j] - ellipsoid_mean_curvature(a, n, surf.r(j))));
  }

  const auto& grid = *surf.meridian_grid();
  rep.pole_h = grid.interpolate(h, 0.0, Reflection::even());
  rep.equator_h = grid.interpolate(h, M_PI / 2, Reflection::even());
  rep.equator_kappa.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto ki = data.field([i](const NodeExtrinsic& e) { return e.kappa(i); });
    rep.equator_kappa(i) = grid.interpolate(ki, M_PI / 2, Reflection::even());
  }
  const auto deficit = umbilic_deficit(data);
  rep.equator_deficit = grid.interpolate(deficit.per_node, M_PI / 2, Reflection::even());
  rep.min_interior_deficit = std::numeric_limits<double>::infinity();
  for (int j = 0; j < surf.size(); ++j) {
    if (std::abs(std::cos(grid.node(j))) < 0.9) {
      rep.min_interior_deficit = std::min(rep.min_interior_deficit, deficit.per_node[j]);
    }
  }

  const double lo = std::min(1.0, a), hi = std::max(1.0, a);
  constexpr int samples = 200;
  rep.min_phi_derivative = std::numeric_limits<double>::infinity();
  for (int i = 1; i < samples; ++i) {
    const double r = lo + (hi - lo) * i / samples;
    rep.min_phi_derivative = std::min(rep.min_phi_derivative, ellipsoid_mean_curvature_derivative(a, n, r));
  }
  rep.phi_increasing = hi > lo && rep.min_phi_derivative > 0.0;

  rep.star_shaped = hypothesis_flags(surf, data, 1).star_shaped;

  TheoremOptions opt;
  opt.phi = [a, n](double r) { return ellipsoid_mean_curvature(a, n, r); };
  rep.cor_hphi = theorem_check(surf, data, Theorem::CorHphi, opt);

  if (a == 1.0) {
    rep.note = "a = 1 is the round sphere: Phi is constant and the example is vacuous";
  } else if (a < 1.0) {
    rep.note = "a < 1: r ranges over (a, 1); Phi is still increasing in r";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence

ConvergenceStudy convergence_study(const std::function<CheckResult(int)>& check,
                                   const std::vector<int>& levels, double floor) {
  if (levels.size() < 3) throw std::invalid_argument("convergence study needs at least 3 levels");
  ConvergenceStudy s;
  s.levels = levels;
  for (int N : levels) s.results.push_back(check(N));

  std::vector<double> err;
  for (const auto& c : s.results) err.push_back(std::abs(c.normalized()));
  s.saturated = std::all_of(err.begin(), err.end(), [&](double e) { return e <= floor; });

  double order = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    if (err[i] <= floor || err[i + 1] <= floor) {
      s.pair_orders.push_back(kNaN);
      continue;
    }
    const double p = std::log(err[i] / err[i + 1]) /
                     std::log(static_cast<double>(levels[i + 1]) / levels[i]);
    s.pair_orders.push_back(p);
    if (err[i + 1] > err[i]) s.monotone = false;
    order = std::min(order, p);
    any = true;
  }
  s.order = (any && s.monotone) ? order : kNaN;
  if (std::isfinite(s.order)) s.results.back().convergence_order = s.order;
  return s;
}

}  // namespace warpgeo
