#include "warpgeo/ambient.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace warpgeo {

TangentDecomposition TangentDecomposition::radial_unit(int n) {
  return {1.0, Eigen::VectorXd::Zero(n)};
}

TangentDecomposition TangentDecomposition::fiber_unit(int n, int index) {
  TangentDecomposition v{0.0, Eigen::VectorXd::Zero(n)};
  v.fiber(index) = 1.0;
  return v;
}

TangentDecomposition operator+(const TangentDecomposition& a, const TangentDecomposition& b) {
  return {a.radial + b.radial, a.fiber + b.fiber};
}

TangentDecomposition operator*(double s, const TangentDecomposition& a) {
  return {s * a.radial, s * a.fiber};
}

AmbientSpace::AmbientSpace(WarpingProfile profile, int n, double epsilon, std::string name)
    : profile_(std::move(profile)), n_(n), epsilon_(epsilon), name_(std::move(name)) {
  if (n_ < 2) throw std::invalid_argument("fiber dimension must be at least 2");
  if (name_.empty()) name_ = profile_.name();
}

void AmbientSpace::require_interior(double r) const {
  if (!(r > 0.0) || !(r < profile_.r_max())) {
    throw std::domain_error("r = " + std::to_string(r) + " is not interior to the warped product");
  }
}

double AmbientSpace::metric(double r, const TangentDecomposition& x,
                            const TangentDecomposition& y) const {
  const double lambda = eval(r).lambda;
  return x.radial * y.radial + lambda * lambda * x.fiber.dot(y.fiber);
}

TangentDecomposition AmbientSpace::connection(double r, const TangentDecomposition& u,
                                              const TangentDecomposition& v) const {
  require_interior(r);
  const auto [lambda, dlambda, ddlambda] = eval(r);
  if (lambda <= 0.0) throw std::domain_error("connection undefined where lambda = 0");
  const double ratio = dlambda / lambda;
  TangentDecomposition out;
  out.radial = -lambda * dlambda * u.fiber.dot(v.fiber);
  out.fiber = ratio * (u.radial * v.fiber + v.radial * u.fiber);
  return out;
}

double AmbientSpace::riemann(double r, const TangentDecomposition& x1,
                             const TangentDecomposition& x2, const TangentDecomposition& x3,
                             const TangentDecomposition& x4) const {
  require_interior(r);
  const auto [lambda, dlambda, ddlambda] = eval(r);
  const double l2 = lambda * lambda;
  const double a = (epsilon_ - dlambda * dlambda) / (2.0 * l2);
  const double b = ddlambda / lambda + (epsilon_ - dlambda * dlambda) / l2;
  auto g = [l2](const TangentDecomposition& x, const TangentDecomposition& y) {
    return x.radial * y.radial + l2 * x.fiber.dot(y.fiber);
  };
  auto dr2 = [](const TangentDecomposition& x, const TangentDecomposition& y) {
    return x.radial * y.radial;
  };
  return a * kulkarni_nomizu(g, g, x1, x2, x3, x4) - b * kulkarni_nomizu(g, dr2, x1, x2, x3, x4);
}

double AmbientSpace::ricci(double r, const TangentDecomposition& u,
                           const TangentDecomposition& v) const {
  require_interior(r);
  const auto [lambda, dlambda, ddlambda] = eval(r);
  const double l2 = lambda * lambda;
  // Ric(d_r, d_r) = -n lambda''/lambda, Ric(d_r, V) = 0,
  // Ric(V, U) = Ric^P(V, U) - (lambda''/lambda + (n-1) lambda'^2/lambda^2) g(V, U).
  const double radial = -n_ * ddlambda / lambda;
  const double fiber_coeff = (n_ - 1) * epsilon_ / l2 - ddlambda / lambda -
                             (n_ - 1) * dlambda * dlambda / l2;
  return radial * u.radial * v.radial + fiber_coeff * l2 * u.fiber.dot(v.fiber);
}

double AmbientSpace::sectional_curvature(double r, const TangentDecomposition& x,
                                         const TangentDecomposition& y) const {
  const double area2 = metric(r, x, x) * metric(r, y, y) - std::pow(metric(r, x, y), 2);
  if (area2 <= 0.0) throw std::invalid_argument("sectional curvature of a degenerate plane");
  return riemann(r, x, y, x, y) / area2;
}

double AmbientSpace::c4_function(double r) const {
  const auto [lambda, dlambda, ddlambda] = eval(r);
  return ddlambda / lambda + (epsilon_ - dlambda * dlambda) / (lambda * lambda);
}

double AmbientSpace::c3_function(double r) const {
  const auto [lambda, dlambda, ddlambda] = eval(r);
  return 2.0 * ddlambda / lambda - (n_ - 1) * (epsilon_ - dlambda * dlambda) / (lambda * lambda);
}

ConditionReport AmbientSpace::check_conditions(const std::vector<double>& r_grid) const {
  if (r_grid.empty()) throw std::invalid_argument("check_conditions: empty r grid");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    require_interior(r_grid[i]);
    if (i > 0 && !(r_grid[i] > r_grid[i - 1])) {
      throw std::invalid_argument("check_conditions: r grid must be strictly increasing");
    }
  }

  ConditionReport rep;
  rep.mode = profile_.mode();
  const ProfileValues at0 = eval(0.0);
  // lambda'(0) = sqrt(phi(s0)) turns a root error of 1e-16 into 1e-8.
  rep.c1 = std::abs(at0.dlambda) <= 1e-6 && at0.ddlambda > 0.0;
  rep.c1_margin = rep.c1 ? at0.ddlambda : -std::abs(at0.dlambda);
  rep.cone_point = std::abs(at0.lambda) <= 1e-12 && std::abs(at0.dlambda - 1.0) <= 1e-10;

  rep.c2_margin = std::numeric_limits<double>::infinity();
  rep.c4_margin = std::numeric_limits<double>::infinity();
  rep.ricci_fiber_margin = std::numeric_limits<double>::infinity();
  rep.c3_margin = std::numeric_limits<double>::infinity();
  double prev_c3 = 0.0;
  double c3_scale = 0.0;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double r = r_grid[i];
    const auto [lambda, dlambda, ddlambda] = eval(r);
    rep.c2_margin = std::min(rep.c2_margin, dlambda);
    rep.c4_margin = std::min(rep.c4_margin, c4_function(r));
    rep.ricci_fiber_margin =
        std::min(rep.ricci_fiber_margin, epsilon_ - dlambda * dlambda + lambda * ddlambda);
    const double c3 = c3_function(r);
    c3_scale = std::max(c3_scale, std::abs(c3));
    if (i > 0) rep.c3_margin = std::min(rep.c3_margin, c3 - prev_c3);
    prev_c3 = c3;
  }
  if (r_grid.size() == 1) rep.c3_margin = 0.0;

  constexpr double tol = 1e-10;
  rep.c2 = rep.c2_margin > 0.0;
  rep.c3 = rep.c3_margin >= -tol * std::max(1.0, c3_scale);
  rep.c4 = rep.c4_margin > tol;
  rep.c4_weak = rep.c4_margin >= -tol;
  rep.ricci_fiber = rep.ricci_fiber_margin >= -tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

double find_root(const std::function<double(double)>& f, double lo, double hi) {
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

// Simple roots of phi on (0, inf): first upward crossing, and the next downward one if any.
std::pair<double, double> shape_roots(const std::function<double(double)>& phi) {
  double s_prev = 1e-4;
  double f_prev = phi(s_prev);
  double s0 = -1.0;
  for (double s = s_prev * 1.01; s < 1e6; s *= 1.01) {
    const double f = phi(s);
    if (s0 < 0.0 && f_prev < 0.0 && f >= 0.0) {
      s0 = find_root(phi, s_prev, s);
    } else if (s0 > 0.0 && f_prev > 0.0 && f <= 0.0) {
      return {s0, find_root(phi, s_prev, s)};
    }
    s_prev = s;
    f_prev = f;
  }
  if (s0 < 0.0) throw std::invalid_argument("shape function has no positive horizon root");
  return {s0, std::numeric_limits<double>::infinity()};
}

}  // namespace

AmbientSpace make_ambient(const std::string& kind, int n, const AmbientParams& params) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (kind == "euclidean") {
    auto p = WarpingProfile::closed_form(
        "euclidean", [](double r) { return ProfileValues{r, 1.0, 0.0}; },
        [](double r) { return 0.5 * r * r; }, inf, BoundaryMode::ConePoint);
    return AmbientSpace(std::move(p), n, 1.0, "euclidean");
  }
  if (kind == "sphere") {
    auto p = WarpingProfile::closed_form(
        "sphere", [](double r) { return ProfileValues{std::sin(r), std::cos(r), -std::sin(r)}; },
        [](double r) { return 1.0 - std::cos(r); }, M_PI, BoundaryMode::ConePoint);
    return AmbientSpace(std::move(p), n, 1.0, "sphere");
  }
  if (kind == "hyperbolic") {
    auto p = WarpingProfile::closed_form(
        "hyperbolic",
        [](double r) { return ProfileValues{std::sinh(r), std::cosh(r), std::sinh(r)}; },
        [](double r) { return std::cosh(r) - 1.0; }, inf, BoundaryMode::ConePoint);
    return AmbientSpace(std::move(p), n, 1.0, "hyperbolic");
  }
  if (kind == "dss") {
    const double m = params.m;
    const double c = params.c;
    if (!(m > 0.0) || c < 0.0) throw std::invalid_argument("dss needs m > 0 and c >= 0");
    ShapeFunction shape{
        [=](double s) { return 1.0 - m * std::pow(s, 1.0 - n) - c * s * s; },
        [=](double s) { return (n - 1.0) * m * std::pow(s, -static_cast<double>(n)) - 2.0 * c * s; }};
    const auto [s0, s1] = shape_roots(shape.phi);
    return AmbientSpace(WarpingProfile::shape_function("dss", shape, s0, s1), n, 1.0, "dss");
  }
  if (kind == "rn") {
    const double m = params.m;
    const double q2 = params.q * params.q;
    if (!(m > 0.0)) throw std::invalid_argument("rn needs m > 0");
    ShapeFunction shape{
        [=](double s) {
          return 1.0 - m * std::pow(s, 1.0 - n) + q2 * std::pow(s, 2.0 * (1.0 - n));
        },
        [=](double s) {
          return (n - 1.0) * m * std::pow(s, -static_cast<double>(n)) -
                 2.0 * (n - 1.0) * q2 * std::pow(s, 1.0 - 2.0 * n);
        }};
    // The outer horizon is the largest root; phi stays positive beyond it.
    double s_outer = -1.0;
    double prev = 1e-4;
    for (double s = prev * 1.01; s < 1e6; s *= 1.01) {
      if (shape.phi(prev) < 0.0 && shape.phi(s) >= 0.0) s_outer = find_root(shape.phi, prev, s);
      prev = s;
    }
    if (s_outer < 0.0 || !(shape.dphi(s_outer) > 0.0)) {
      throw std::invalid_argument("rn parameters admit no outer horizon (need m^2 > 4 q^2 for n = 2)");
    }
    return AmbientSpace(WarpingProfile::shape_function("rn", shape, s_outer), n, 1.0, "rn");
  }
  throw std::invalid_argument("unknown ambient kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Polar chart

double sn_eps(double eps, double t) {
  if (eps > 0.0) return std::sin(std::sqrt(eps) * t) / std::sqrt(eps);
  if (eps < 0.0) return std::sinh(std::sqrt(-eps) * t) / std::sqrt(-eps);
  return t;
}

double cn_eps(double eps, double t) {
  if (eps > 0.0) return std::cos(std::sqrt(eps) * t);
  if (eps < 0.0) return std::cosh(std::sqrt(-eps) * t);
  return 1.0;
}

Eigen::VectorXd PolarChart::fiber_factors(const Eigen::VectorXd& x) const {
  const int n = space_->n();
  Eigen::VectorXd p(n);
  p(0) = 1.0;
  if (n >= 2) p(1) = std::pow(sn_eps(space_->epsilon(), x(1)), 2);
  for (int i = 2; i < n; ++i) p(i) = p(i - 1) * std::pow(std::sin(x(i)), 2);
  return p;
}

Eigen::VectorXd PolarChart::metric_diagonal(const Eigen::VectorXd& x) const {
  const double lambda = space_->eval(x(0)).lambda;
  Eigen::VectorXd g(dim());
  g(0) = 1.0;
  g.tail(space_->n()) = lambda * lambda * fiber_factors(x);
  return g;
}

std::vector<Eigen::MatrixXd> PolarChart::christoffel(const Eigen::VectorXd& x) const {
  const int d = dim();
  const auto [lambda, dlambda, ddlambda] = space_->eval(x(0));
  const Eigen::VectorXd g = metric_diagonal(x);

  // dg(c, a) = d_c g_aa.
  Eigen::MatrixXd dg = Eigen::MatrixXd::Zero(d, d);
  for (int a = 1; a < d; ++a) dg(0, a) = 2.0 * dlambda / lambda * g(a);
  const double eps = space_->epsilon();
  const double cot1 = cn_eps(eps, x(1)) / sn_eps(eps, x(1));
  for (int a = 2; a < d; ++a) dg(1, a) = 2.0 * cot1 * g(a);
  for (int j = 2; j < d; ++j) {
    const double cot = std::cos(x(j)) / std::sin(x(j));
    for (int a = j + 1; a < d; ++a) dg(j, a) = 2.0 * cot * g(a);
  }

  std::vector<Eigen::MatrixXd> gamma(d, Eigen::MatrixXd::Zero(d, d));
  for (int a = 0; a < d; ++a) {
    gamma[a](a, a) = dg(a, a) / (2.0 * g(a));
    for (int b = 0; b < d; ++b) {
      if (b == a) continue;
      gamma[a](a, b) = gamma[a](b, a) = dg(b, a) / (2.0 * g(a));
      gamma[a](b, b) = -dg(a, b) / (2.0 * g(a));
    }
  }
  return gamma;
}

TangentDecomposition PolarChart::decompose(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
  const Eigen::VectorXd p = fiber_factors(x);
  TangentDecomposition out{v(0), Eigen::VectorXd(space_->n())};
  for (int i = 0; i < space_->n(); ++i) out.fiber(i) = v(i + 1) * std::sqrt(p(i));
  return out;
}

Eigen::VectorXd PolarChart::compose(const Eigen::VectorXd& x, const TangentDecomposition& v) const {
  const Eigen::VectorXd p = fiber_factors(x);
  Eigen::VectorXd out(dim());
  out(0) = v.radial;
  for (int i = 0; i < space_->n(); ++i) out(i + 1) = v.fiber(i) / std::sqrt(p(i));
  return out;
}

}  // namespace warpgeo
