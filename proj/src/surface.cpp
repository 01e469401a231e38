#include "warpgeo/surface.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace warpgeo {

// ---------------------------------------------------------------------------
// Meridians and radial functions

MeridianCurve MeridianCurve::circle(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
  return {"circle(" + std::to_string(radius) + ")",
          [radius](double t) { return MeridianPoint{radius, 0.0, 0.0, t, 1.0, 0.0}; }};
}

MeridianCurve MeridianCurve::slice(double r0) {
  auto c = circle(r0);
  c.name = "slice(" + std::to_string(r0) + ")";
  return c;
}

MeridianCurve MeridianCurve::perturbed_slice(double r0, double amplitude, int mode) {
  if (!(r0 > std::abs(amplitude))) throw std::invalid_argument("perturbed slice needs r0 > |A|");
  return {"perturbed_slice(" + std::to_string(r0) + "," + std::to_string(amplitude) + "," +
              std::to_string(mode) + ")",
          [=](double t) {
            const double k = mode;
            return MeridianPoint{r0 + amplitude * std::cos(k * t), -amplitude * k * std::sin(k * t),
                                 -amplitude * k * k * std::cos(k * t), t, 1.0, 0.0};
          }};
}

MeridianCurve MeridianCurve::ellipse(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("ellipse axis must be positive");
  return {"ellipse(" + std::to_string(a) + ")", [a](double t) {
            const double c = std::cos(t), s = std::sin(t);
            MeridianPoint p;
            p.r = std::sqrt(s * s + a * a * c * c);
            p.dr = -(a * a - 1.0) * std::sin(2.0 * t) / (2.0 * p.r);
            p.ddr = (-(a * a - 1.0) * std::cos(2.0 * t) - p.dr * p.dr) / p.r;
            p.theta = std::atan2(s, a * c);
            p.dtheta = a / (p.r * p.r);
            p.ddtheta = -2.0 * a * p.dr / (p.r * p.r * p.r);
            return p;
          }};
}

MeridianCurve MeridianCurve::offset_circle(double radius, double offset) {
  if (!(radius > std::abs(offset))) {
    throw std::invalid_argument("offset circle must enclose the origin (radius > |offset|)");
  }
  return {"offset_circle(" + std::to_string(radius) + "," + std::to_string(offset) + ")",
          [=](double t) {
            const double R = radius, c = offset;
            MeridianPoint p;
            const double x = c + R * std::cos(t), y = R * std::sin(t);
            const double r2 = x * x + y * y;
            p.r = std::sqrt(r2);
            p.dr = -c * R * std::sin(t) / p.r;
            p.ddr = (-c * R * std::cos(t) - p.dr * p.dr) / p.r;
            p.theta = std::atan2(y, x);
            const double num = R * R + c * R * std::cos(t);
            p.dtheta = num / r2;
            p.ddtheta = (-c * R * std::sin(t) * r2 - num * 2.0 * p.r * p.dr) / (r2 * r2);
            return p;
          }};
}

double real_harmonic(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  if (l < 0 || am > l) throw std::invalid_argument("harmonic needs 0 <= |m| <= l");
  const double p = std::assoc_legendre(static_cast<unsigned>(l), static_cast<unsigned>(am),
                                       std::cos(theta));
  return m >= 0 ? p * std::cos(am * phi) : p * std::sin(am * phi);
}

double RadialFunction::operator()(double theta, double phi) const {
  double v = base;
  for (const auto& t : terms) v += t.coeff * real_harmonic(t.l, t.m, theta, phi);
  return v;
}

// ---------------------------------------------------------------------------
// DiscreteHypersurface

int DiscreteHypersurface::resolution() const {
  return kind_ == SurfaceKind::Rotational ? meridian_->size() : sphere_->n_phi();
}

Eigen::MatrixXd DiscreteHypersurface::tangents(int a) const {
  const int d = n() + 1;
  Eigen::MatrixXd t(d, n());
  for (int i = 0; i < n(); ++i) t.col(i) = tangent_[i].col(a);
  return t;
}

Eigen::VectorXd DiscreteHypersurface::second(int a, int i, int j) const {
  const int s = kind_ == SurfaceKind::Rotational ? 1 : 2;
  if (i >= s || j >= s) return Eigen::VectorXd::Zero(n() + 1);
  return second_[i * s + j].col(a);
}

std::vector<double> DiscreteHypersurface::derivative(std::span<const double> field, int dir,
                                                     double parity) const {
  if (static_cast<int>(field.size()) != size()) {
    throw std::invalid_argument("field size does not match the surface");
  }
  if (kind_ == SurfaceKind::Rotational) {
    if (dir == 0) return meridian_->d1(field, Reflection{parity, 0.0, 0.0});
    return std::vector<double>(field.size(), 0.0);
  }
  if (dir == 0) return sphere_->d_theta(field, parity);
  return sphere_->d_phi(field);
}

void DiscreteHypersurface::finish_weights() {
  const PolarChart chart(*ambient_);
  weights_.resize(base_.size());
  for (int a = 0; a < size(); ++a) {
    const Eigen::MatrixXd t = tangents(a);
    const Eigen::VectorXd gd = chart.metric_diagonal(coords_.col(a));
    const Eigen::MatrixXd g = t.transpose() * gd.asDiagonal() * t;
    const double det = g.determinant();
    if (!(det > 0.0)) throw std::domain_error("degenerate induced metric at node " + std::to_string(a));
    weights_[a] = base_[a] * std::sqrt(det) * orbit_factor_;
  }
}

namespace {

double sphere_volume(int k) {  // |S^k|
  return 2.0 * std::pow(M_PI, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

bool segments_cross(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                    const Eigen::Vector2d& q2) {
  auto orient = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  };
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

bool polyline_simple(const std::vector<Eigen::Vector2d>& pts) {
  const int m = static_cast<int>(pts.size()) - 1;
  for (int i = 0; i < m; ++i)
    for (int j = i + 2; j < m; ++j) {
      if (segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1])) return false;
    }
  return true;
}

void require_domain(const AmbientSpace& ambient, double r, const std::string& what) {
  if (!(r > 0.0) || !(r < ambient.profile().r_max())) {
    throw std::domain_error(what + " leaves the ambient domain (r = " + std::to_string(r) + ")");
  }
}

}  // namespace

DiscreteHypersurface build_rotational_nodes(const AmbientSpace& ambient, std::string name,
                                            std::span<const double> r,
                                            std::span<const double> theta) {
  if (ambient.epsilon() != 1.0) {
    throw std::invalid_argument("rotational surfaces need a round fiber (epsilon = 1)");
  }
  if (r.size() != theta.size()) throw std::invalid_argument("r and theta sizes differ");
  const int count = static_cast<int>(r.size());
  const int n = ambient.n();
  const int d = n + 1;

  DiscreteHypersurface s;
  s.kind_ = SurfaceKind::Rotational;
  s.name_ = std::move(name);
  s.ambient_ = std::make_shared<const AmbientSpace>(ambient);
  s.meridian_.emplace(count);
  const auto& grid = *s.meridian_;

  for (int j = 0; j < count; ++j) {
    require_domain(ambient, r[j], "meridian");
    if (!(theta[j] > 0.0 && theta[j] < M_PI)) {
      throw std::domain_error("meridian polar angle leaves (0, pi) at node " + std::to_string(j));
    }
  }

  const auto dr = grid.d1(r, Reflection::even());
  const auto ddr = grid.d2(r, Reflection::even());
  const auto dth = grid.d1(theta, Reflection::polar_angle());
  const auto ddth = grid.d2(theta, Reflection::polar_angle());

  s.coords_ = Eigen::MatrixXd::Constant(d, count, 0.5 * M_PI);
  s.tangent_.assign(n, Eigen::MatrixXd::Zero(d, count));
  s.second_.assign(1, Eigen::MatrixXd::Zero(d, count));
  s.angles_ = Eigen::MatrixXd::Zero(2, count);
  for (int j = 0; j < count; ++j) {
    s.coords_(0, j) = r[j];
    s.coords_(1, j) = theta[j];
    s.tangent_[0](0, j) = dr[j];
    s.tangent_[0](1, j) = dth[j];
    for (int m = 1; m < n; ++m) s.tangent_[m](m + 1, j) = 1.0;
    s.second_[0](0, j) = ddr[j];
    s.second_[0](1, j) = ddth[j];
    s.angles_(0, j) = theta[j];
  }

  s.base_ = grid.base_weights(n);
  s.orbit_factor_ = sphere_volume(n - 1);
  s.finish_weights();

  std::vector<Eigen::Vector2d> pts;
  pts.reserve(count);
  for (int j = 0; j < count; ++j) {
    pts.emplace_back(r[j] * std::cos(theta[j]), r[j] * std::sin(theta[j]));
  }
  s.embedded_ = polyline_simple(pts);
  return s;
}

DiscreteHypersurface build_rotational(const AmbientSpace& ambient, const MeridianCurve& meridian,
                                      int n_s) {
  if (ambient.epsilon() != 1.0) {
    throw std::invalid_argument("rotational surfaces need a round fiber (epsilon = 1)");
  }
  for (double t : {0.0, M_PI}) {
    const auto p = meridian.eval(t);
    require_domain(ambient, p.r, "meridian " + meridian.name);
    const double target = t == 0.0 ? 0.0 : M_PI;
    if (std::abs(p.theta - target) > 1e-9) {
      throw std::invalid_argument("meridian " + meridian.name + " does not reach the axis at t = " +
                                  std::to_string(t));
    }
    if (std::abs(p.dr) > 1e-8 * std::max(1.0, p.r) || std::abs(p.dtheta) < 1e-12) {
      throw std::invalid_argument("meridian " + meridian.name +
                                  " meets the axis non-orthogonally (surface not smooth)");
    }
  }
  const MeridianGrid grid(n_s);
  std::vector<double> r(n_s), theta(n_s);
  for (int j = 0; j < n_s; ++j) {
    const auto p = meridian.eval(grid.node(j));
    r[j] = p.r;
    theta[j] = p.theta;
  }
  auto s = build_rotational_nodes(ambient, meridian.name, r, theta);
  s.curve_ = meridian;
  return s;
}

DiscreteHypersurface build_graph_nodes(const AmbientSpace& ambient, std::string name, int n_theta,
                                       int n_phi, std::span<const double> rho) {
  if (ambient.n() != 2 || ambient.epsilon() != 1.0) {
    throw std::invalid_argument("radial graphs need n = 2 and a round fiber");
  }
  DiscreteHypersurface s;
  s.kind_ = SurfaceKind::Graph;
  s.name_ = std::move(name);
  s.ambient_ = std::make_shared<const AmbientSpace>(ambient);
  s.sphere_.emplace(n_theta, n_phi);
  const auto& grid = *s.sphere_;
  const int count = grid.size();
  if (static_cast<int>(rho.size()) != count) throw std::invalid_argument("rho size mismatch");
  for (int a = 0; a < count; ++a) require_domain(ambient, rho[a], "graph " + s.name_);

  const auto rt = grid.d_theta(rho);
  const auto rp = grid.d_phi(rho);
  const auto rtt = grid.d_theta2(rho);
  const auto rpp = grid.d_phi2(rho);
  const auto rtp = grid.d_phi(rt);

  s.coords_ = Eigen::MatrixXd::Zero(3, count);
  s.tangent_.assign(2, Eigen::MatrixXd::Zero(3, count));
  s.second_.assign(4, Eigen::MatrixXd::Zero(3, count));
  s.angles_ = Eigen::MatrixXd::Zero(2, count);
  for (int j = 0; j < n_theta; ++j)
    for (int k = 0; k < n_phi; ++k) {
      const int a = grid.index(j, k);
      s.coords_.col(a) << rho[a], grid.theta(j), grid.phi(k);
      s.tangent_[0].col(a) << rt[a], 1.0, 0.0;
      s.tangent_[1].col(a) << rp[a], 0.0, 1.0;
      s.second_[0](0, a) = rtt[a];
      s.second_[1](0, a) = rtp[a];
      s.second_[2](0, a) = rtp[a];
      s.second_[3](0, a) = rpp[a];
      s.angles_.col(a) << grid.theta(j), grid.phi(k);
    }
  s.base_ = grid.base_weights();
  s.orbit_factor_ = 1.0;
  s.finish_weights();
  return s;
}

DiscreteHypersurface build_radial_graph(const AmbientSpace& ambient, const RadialFunction& rho,
                                        int n_theta, int n_phi) {
  const SphereGrid grid(n_theta, n_phi);
  std::vector<double> values(grid.size());
  for (int j = 0; j < n_theta; ++j)
    for (int k = 0; k < n_phi; ++k) values[grid.index(j, k)] = rho(grid.theta(j), grid.phi(k));
  return build_graph_nodes(ambient, rho.name, n_theta, n_phi, values);
}

// ---------------------------------------------------------------------------
// Extrinsic geometry

std::vector<double> ExtrinsicData::mean_curvature(int k) const {
  const double c = binomial(n, k);
  return field([&](const NodeExtrinsic& e) { return e.sigma(k) / c; });
}

PrincipalCurvatures rotational_closed_form_curvatures(const AmbientSpace& ambient,
                                                      const MeridianPoint& p) {
  const auto [lambda, dl, ddl] = ambient.eval(p.r);
  (void)ddl;
  const double L = std::sqrt(p.dr * p.dr + lambda * lambda * p.dtheta * p.dtheta);
  const double k_mer =
      (lambda * (p.dr * p.ddtheta - p.dtheta * p.ddr) +
       dl * p.dtheta * (lambda * lambda * p.dtheta * p.dtheta + 2.0 * p.dr * p.dr)) /
      (L * L * L);
  const double st = std::sin(p.theta);
  const double k_rot = (lambda * dl * p.dtheta * st - p.dr * std::cos(p.theta)) / (L * lambda * st);
  PrincipalCurvatures k(ambient.n());
  k(0) = k_mer;
  for (int i = 1; i < ambient.n(); ++i) k(i) = k_rot;
  std::sort(k.data(), k.data() + k.size());
  return k;
}

ExtrinsicData extrinsic_data(const DiscreteHypersurface& surf) {
  const AmbientSpace& amb = surf.ambient();
  const PolarChart chart(amb);
  const int n = surf.n();
  const int d = n + 1;
  ExtrinsicData out;
  out.n = n;
  out.nodes.resize(surf.size());

  for (int a = 0; a < surf.size(); ++a) {
    NodeExtrinsic& e = out.nodes[a];
    const Eigen::VectorXd x = surf.coords(a);
    const Eigen::MatrixXd t = surf.tangents(a);
    const Eigen::VectorXd gd = chart.metric_diagonal(x);

    e.g = t.transpose() * gd.asDiagonal() * t;
    const double det = e.g.determinant();
    if (!(det > 0.0)) throw std::domain_error("degenerate induced metric at node " + std::to_string(a));
    e.sqrt_det = std::sqrt(det);
    e.g_inv = e.g.inverse();

    // Cofactor covector: w . t_i = 0 and det[nu | t] > 0.
    Eigen::VectorXd w(d);
    Eigen::MatrixXd minor(n, n);
    for (int c = 0; c < d; ++c) {
      for (int row = 0, m = 0; row < d; ++row) {
        if (row == c) continue;
        minor.row(m++) = t.row(row);
      }
      w(c) = ((c % 2 == 0) ? 1.0 : -1.0) * minor.determinant();
    }
    e.nu = w.cwiseQuotient(gd);
    e.nu /= std::sqrt(w.dot(e.nu));
    e.nu_split = chart.decompose(x, e.nu);

    const auto gamma = chart.christoffel(x);
    e.h.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Eigen::VectorXd acc = surf.second(a, i, j);
        for (int c = 0; c < d; ++c) acc(c) += t.col(i).dot(gamma[c] * t.col(j));
        e.h(i, j) = e.h(j, i) = -(gd.cwiseProduct(e.nu)).dot(acc);
      }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(e.h, e.g);
    e.kappa = es.eigenvalues();
    e.principal_coeffs = es.eigenvectors();
    e.principal_dirs = t * e.principal_coeffs;

    e.r = x(0);
    e.profile = amb.eval(e.r);
    e.u = e.profile.lambda * e.nu(0);
    e.eta = amb.profile().primitive(e.r);
    e.dr_tan = e.g_inv * t.row(0).transpose();
    e.sigma = sigma_all(e.kappa);
  }

  if (surf.kind() == SurfaceKind::Rotational && surf.meridian_curve()) {
    const auto& grid = *surf.meridian_grid();
    for (int j = 0; j < surf.size(); ++j) {
      out.nodes[j].kappa_closed =
          rotational_closed_form_curvatures(amb, surf.meridian_curve()->eval(grid.node(j)));
    }
  }
  return out;
}

GradientField scalar_gradient(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                              std::span<const double> field) {
  const int n = surf.n();
  std::vector<std::vector<double>> df(n);
  for (int i = 0; i < n; ++i) df[i] = surf.derivative(field, i);
  GradientField out;
  out.components.resize(surf.size());
  out.along_dr.resize(surf.size());
  out.norm.resize(surf.size());
  Eigen::VectorXd cov(n);
  for (int a = 0; a < surf.size(); ++a) {
    const auto& e = data.nodes[a];
    for (int i = 0; i < n; ++i) cov(i) = df[i][a];
    out.components[a] = e.g_inv * cov;
    out.along_dr[a] = cov.dot(e.dr_tan);
    out.norm[a] = std::sqrt(std::max(0.0, cov.dot(out.components[a])));
  }
  return out;
}

std::vector<double> laplacian(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                              std::span<const double> field) {
  const int n = surf.n();
  const auto grad = scalar_gradient(surf, data, field);
  std::vector<double> out(surf.size(), 0.0);
  if (surf.kind() == SurfaceKind::Rotational) {
    // sqrt(g) = D sin^{n-1}(theta) with D smooth; the sine factor is differentiated exactly
    // so the division near the axis is by D alone.
    std::vector<double> flux(surf.size()), density(surf.size());
    for (int a = 0; a < surf.size(); ++a) {
      density[a] = data.nodes[a].sqrt_det / std::pow(std::sin(surf.theta(a)), n - 1);
      flux[a] = density[a] * grad.components[a](0);
    }
    const auto div = surf.derivative(flux, 0, -1.0);
    for (int a = 0; a < surf.size(); ++a) {
      const double th = surf.theta(a);
      out[a] = (div[a] + (n - 1) * std::cos(th) / std::sin(th) * surf.tangents(a)(1, 0) * flux[a]) / density[a];
    }
    return out;
  }
  const int dirs = 2;
  // The polar flux sqrt(g) g^{tj} d_j f has parity (-1)^n under pole reflection.
  const double flux_parity = n % 2 == 0 ? 1.0 : -1.0;
  for (int i = 0; i < dirs; ++i) {
    std::vector<double> flux(surf.size());
    for (int a = 0; a < surf.size(); ++a) flux[a] = data.nodes[a].sqrt_det * grad.components[a](i);
    const auto div = surf.derivative(flux, i, i == 0 ? flux_parity : 1.0);
    for (int a = 0; a < surf.size(); ++a) out[a] += div[a];
  }
  for (int a = 0; a < surf.size(); ++a) out[a] /= data.nodes[a].sqrt_det;
  return out;
}

double integrate(const DiscreteHypersurface& surf, std::span<const double> field) {
  const auto& w = surf.weights();
  if (field.size() != w.size()) throw std::invalid_argument("field size does not match the surface");
  double sum = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a) sum += w[a] * field[a];
  return sum;
}

UmbilicDeficit umbilic_deficit(const ExtrinsicData& data) {
  UmbilicDeficit out;
  out.per_node.resize(data.nodes.size());
  for (std::size_t a = 0; a < data.nodes.size(); ++a) {
    const auto& k = data.nodes[a].kappa;
    const double mean = k.sum() / k.size();
    out.per_node[a] = (k.array() - mean).square().sum();
    out.max = std::max(out.max, out.per_node[a]);
  }
  return out;
}

HypothesisFlags hypothesis_flags(const DiscreteHypersurface& surf, const ExtrinsicData& data, int k,
                                 double tol_grad) {
  if (k < 1 || k > data.n) throw std::out_of_range("hypothesis_flags: k outside [1, n]");
  HypothesisFlags f;
  f.star_margin = f.k_convex_margin = f.convex_margin = std::numeric_limits<double>::infinity();
  for (const auto& e : data.nodes) {
    f.star_margin = std::min(f.star_margin, e.nu(0));
    for (int i = 1; i <= k; ++i) f.k_convex_margin = std::min(f.k_convex_margin, e.sigma(i));
    f.convex_margin = std::min(f.convex_margin, e.kappa.minCoeff());
  }
  f.star_shaped = f.star_margin > 0.0;
  f.k_convex = f.k_convex_margin > 0.0;
  f.strictly_convex = f.convex_margin > 0.0;

  const auto hk = data.mean_curvature(k);
  f.grad_along_dr = scalar_gradient(surf, data, hk).along_dr;
  f.grad_margin = *std::max_element(f.grad_along_dr.begin(), f.grad_along_dr.end());
  f.grad_condition = f.grad_margin <= tol_grad;
  return f;
}

GradientIdentityResiduals gradient_identity_check(const DiscreteHypersurface& surf,
                                                  const ExtrinsicData& data) {
  const int n = surf.n();
  const auto eta = data.field([](const NodeExtrinsic& e) { return e.eta; });
  const auto u = data.field([](const NodeExtrinsic& e) { return e.u; });
  const auto grad_eta = scalar_gradient(surf, data, eta);
  std::vector<std::vector<double>> du(n);
  for (int i = 0; i < n; ++i) du[i] = surf.derivative(u, i);
  const auto lap = laplacian(surf, data, eta);

  GradientIdentityResiduals res;
  Eigen::VectorXd cov(n);
  for (int a = 0; a < surf.size(); ++a) {
    const auto& e = data.nodes[a];
    const double lambda = e.profile.lambda;
    const Eigen::VectorXd va = grad_eta.components[a] - lambda * e.dr_tan;
    res.eta_gradient = std::max(res.eta_gradient, std::sqrt(std::max(0.0, va.dot(e.g * va))));
    for (int i = 0; i < n; ++i) cov(i) = du[i][a];
    const Eigen::VectorXd vb = cov - lambda * e.h * e.dr_tan;
    res.u_gradient = std::max(res.u_gradient, std::sqrt(std::max(0.0, vb.dot(e.g_inv * vb))));
    res.laplacian = std::max(res.laplacian,
                             std::abs(lap[a] - (n * e.profile.dlambda - e.sigma(1) * e.u)));
  }
  return res;
}

void write_node_dump(std::ostream& out, const DiscreteHypersurface& surf, const ExtrinsicData& data) {
  out.precision(12);
  for (int a = 0; a < surf.size(); ++a) {
    out << surf.theta(a) << ' ' << surf.phi(a) << ' ' << surf.r(a) << ' ' << surf.weights()[a];
    for (int i = 0; i < data.n; ++i) out << ' ' << data.nodes[a].kappa(i);
    out << ' ' << data.nodes[a].u << '\n';
  }
}

}  // namespace warpgeo
