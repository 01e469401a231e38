#include "warpgeo/variational.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace warpgeo {

namespace {

constexpr double kPanel = 0.25;

void require_size(const DiscreteHypersurface& surf, std::span<const double> f) {
  if (static_cast<int>(f.size()) != surf.size()) {
    throw std::invalid_argument("variation field has " + std::to_string(f.size()) +
                                " entries, surface has " + std::to_string(surf.size()) + " nodes");
  }
}

// G(r) = int_0^r e^Psi lambda^n for every entry of rs, accumulated over the sorted values.
std::vector<double> radial_primitive(const AmbientSpace& amb, const RadialWeight& psi,
                                     std::span<const double> rs) {
  const int n = amb.n();
  auto density = [&](double r) { return std::exp(psi(r)) * std::pow(amb.eval(r).lambda, n); };
  auto segment = [&](double a, double b) {
    if (b <= a) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / kPanel)));
    const double w = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      sum += boost::math::quadrature::gauss<double, 10>::integrate(density, a + p * w, a + (p + 1) * w);
    }
    return sum;
  };
  std::vector<int> order(rs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return rs[a] < rs[b]; });
  std::vector<double> out(rs.size());
  double prev_r = 0.0, acc = 0.0;
  for (int idx : order) {
    acc += segment(prev_r, rs[idx]);
    prev_r = rs[idx];
    out[idx] = acc;
  }
  return out;
}

std::vector<double> weight_field(const DiscreteHypersurface& surf, const RadialWeight& psi) {
  std::vector<double> w(surf.size());
  for (int a = 0; a < surf.size(); ++a) w[a] = std::exp(psi(surf.r(a)));
  return w;
}

// Graph surface as radius plus unit fiber point on S^2.
struct GraphState {
  std::vector<double> r;
  std::array<std::vector<double>, 3> omega;
};

Eigen::Vector3d unit(double th, double ph) {
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}
Eigen::Vector3d unit_dtheta(double th, double ph) {
  return {std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)};
}
Eigen::Vector3d unit_dphi(double th, double ph) {
  return {-std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph), 0.0};
}

GraphState flow_graph(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                      std::span<const double> f, double t) {
  const auto& grid = *surf.sphere_grid();
  GraphState s;
  s.r.resize(surf.size());
  for (auto& c : s.omega) c.resize(surf.size());
  for (int j = 0; j < grid.n_theta(); ++j)
    for (int k = 0; k < grid.n_phi(); ++k) {
      const int a = grid.index(j, k);
      const double th = grid.theta(j), ph = grid.phi(k);
      const auto& nu = data.nodes[a].nu;
      const double step = -t * f[a];
      s.r[a] = surf.r(a) + step * nu(0);
      Eigen::Vector3d w = unit(th, ph) + step * (nu(1) * unit_dtheta(th, ph) + nu(2) * unit_dphi(th, ph));
      w.normalize();
      for (int c = 0; c < 3; ++c) s.omega[c][a] = w(c);
    }
  return s;
}

struct GraphMeasures {
  double area = 0.0;
  double volume = 0.0;
};

GraphMeasures graph_measures(const DiscreteHypersurface& surf, const GraphState& s,
                             const RadialWeight& psi) {
  const auto& grid = *surf.sphere_grid();
  const AmbientSpace& amb = surf.ambient();
  const auto r_t = grid.d_theta(s.r);
  const auto r_p = grid.d_phi(s.r);
  std::array<std::vector<double>, 3> w_t, w_p;
  for (int c = 0; c < 3; ++c) {
    w_t[c] = grid.d_theta(s.omega[c]);
    w_p[c] = grid.d_phi(s.omega[c]);
  }
  const auto G = radial_primitive(amb, psi, s.r);
  const auto& base = surf.base_weights();
  GraphMeasures m;
  for (int a = 0; a < surf.size(); ++a) {
    const double lambda = amb.eval(s.r[a]).lambda;
    const Eigen::Vector3d w(s.omega[0][a], s.omega[1][a], s.omega[2][a]);
    const Eigen::Vector3d wt(w_t[0][a], w_t[1][a], w_t[2][a]);
    const Eigen::Vector3d wp(w_p[0][a], w_p[1][a], w_p[2][a]);
    const double l2 = lambda * lambda;
    const double gtt = r_t[a] * r_t[a] + l2 * wt.squaredNorm();
    const double gtp = r_t[a] * r_p[a] + l2 * wt.dot(wp);
    const double gpp = r_p[a] * r_p[a] + l2 * wp.squaredNorm();
    m.area += base[a] * std::sqrt(std::max(0.0, gtt * gpp - gtp * gtp));
    m.volume += base[a] * G[a] * w.dot(wt.cross(wp));
  }
  return m;
}

DiscreteHypersurface flow_rotational(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                     std::span<const double> f, double t) {
  std::vector<double> r(surf.size()), theta(surf.size());
  for (int j = 0; j < surf.size(); ++j) {
    const auto& nu = data.nodes[j].nu;
    r[j] = surf.r(j) - t * f[j] * nu(0);
    theta[j] = surf.theta(j) - t * f[j] * nu(1);
  }
  return build_rotational_nodes(surf.ambient(), surf.name(), r, theta);
}

double surface_area(const DiscreteHypersurface& surf) {
  const auto& w = surf.weights();
  return std::accumulate(w.begin(), w.end(), 0.0);
}

// Area and enclosed weighted volume of the surface flowed to time t.
GraphMeasures flowed_measures(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                              std::span<const double> f, double t, const RadialWeight& psi) {
  if (surf.kind() == SurfaceKind::Graph) return graph_measures(surf, flow_graph(surf, data, f, t), psi);
  const auto moved = flow_rotational(surf, data, f, t);
  return {surface_area(moved), enclosed_weighted_volume(moved, psi)};
}

template <class Measure>
DerivativeEstimate central_difference(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                      const VariationSpec& spec, double analytic, Measure measure) {
  DerivativeEstimate est;
  est.analytic = analytic;
  for (double dt : spec.t_steps) {
    if (!(dt > 0.0)) throw std::invalid_argument("variation step sizes must be positive");
    const double plus = measure(flowed_measures(surf, data, spec.f, dt, spec.psi));
    const double minus = measure(flowed_measures(surf, data, spec.f, -dt, spec.psi));
    est.steps.push_back(dt);
    est.finite_diff.push_back((plus - minus) / (2.0 * dt));
    est.mismatch.push_back(est.finite_diff.back() - analytic);
  }
  est.halving_ratio = est.mismatch.size() >= 2 && est.mismatch[1] != 0.0
                          ? est.mismatch[0] / est.mismatch[1]
                          : std::numeric_limits<double>::quiet_NaN();
  return est;
}

}  // namespace

RadialWeight RadialWeight::zero() { return {}; }

RadialWeight RadialWeight::linear(double c) {
  return {"linear:" + std::to_string(c), [c](double r) { return c * r; }};
}

RadialWeight RadialWeight::quadratic(double c) {
  return {"quadratic:" + std::to_string(c), [c](double r) { return c * r * r; }};
}

RadialWeight RadialWeight::parse(const std::string& spec) {
  if (spec == "zero" || spec == "0") return zero();
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    double c = 0.0;
    try {
      std::size_t used = 0;
      c = std::stod(spec.substr(colon + 1), &used);
      if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad weight coefficient in '" + spec + "'");
    }
    if (kind == "linear") return linear(c);
    if (kind == "quadratic") return quadratic(c);
  }
  throw std::invalid_argument("unknown weight '" + spec + "' (zero, linear:c, quadratic:c)");
}

double enclosed_weighted_volume(const DiscreteHypersurface& surf, const RadialWeight& psi) {
  std::vector<double> r(surf.size());
  for (int a = 0; a < surf.size(); ++a) r[a] = surf.r(a);
  const auto G = radial_primitive(surf.ambient(), psi, r);
  const auto& base = surf.base_weights();
  double sum = 0.0;
  if (surf.kind() == SurfaceKind::Rotational) {
    const int n = surf.n();
    for (int a = 0; a < surf.size(); ++a) {
      sum += base[a] * G[a] * std::pow(std::sin(surf.theta(a)), n - 1) * surf.tangents(a)(1, 0);
    }
    return surf.orbit_factor() * sum;
  }
  for (int a = 0; a < surf.size(); ++a) sum += base[a] * G[a] * std::sin(surf.theta(a));
  return sum;
}

DerivativeEstimate weighted_volume_derivative(const DiscreteHypersurface& surf,
                                              const ExtrinsicData& data, const VariationSpec& spec) {
  require_size(surf, spec.f);
  const auto w = weight_field(surf, spec.psi);
  std::vector<double> integrand(surf.size());
  for (int a = 0; a < surf.size(); ++a) integrand[a] = spec.f[a] * w[a];
  // V(t) = W(M_0) - W(M_t).
  return central_difference(surf, data, spec, integrate(surf, integrand),
                            [](const GraphMeasures& m) { return -m.volume; });
}

DerivativeEstimate area_derivative(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                   const VariationSpec& spec) {
  require_size(surf, spec.f);
  std::vector<double> integrand(surf.size());
  for (int a = 0; a < surf.size(); ++a) integrand[a] = -data.nodes[a].sigma(1) * spec.f[a];
  return central_difference(surf, data, spec, integrate(surf, integrand),
                            [](const GraphMeasures& m) { return m.area; });
}

double mean_curvature_constant(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                               const RadialWeight& psi) {
  return integrate(surf, data.mean_curvature(1)) / integrate(surf, weight_field(surf, psi));
}

JDerivative j_derivative(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                         const VariationSpec& spec) {
  require_size(surf, spec.f);
  const int n = data.n;
  const auto h = data.mean_curvature(1);
  const auto w = weight_field(surf, spec.psi);
  JDerivative out;
  out.h0 = mean_curvature_constant(surf, data, spec.psi);
  std::vector<double> j(surf.size()), a(surf.size()), v(surf.size());
  for (int i = 0; i < surf.size(); ++i) {
    j[i] = n * spec.f[i] * (-h[i] + out.h0 * w[i]);
    a[i] = -n * h[i] * spec.f[i];
    v[i] = spec.f[i] * w[i];
  }
  out.value = integrate(surf, j);
  out.cross_check = integrate(surf, a) + n * out.h0 * integrate(surf, v);
  return out;
}

std::vector<double> witness_field(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                  const RadialWeight& psi) {
  const double h0 = mean_curvature_constant(surf, data, psi);
  const auto h = data.mean_curvature(1);
  std::vector<double> f(surf.size());
  for (int a = 0; a < surf.size(); ++a) f[a] = -h[a] * std::exp(-psi(surf.r(a))) + h0;
  return f;
}

std::vector<double> random_field(const DiscreteHypersurface& surf, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> f(surf.size(), 0.0);
  if (surf.kind() == SurfaceKind::Rotational) {
    const auto& grid = *surf.meridian_grid();
    for (int l = 0; l <= 3; ++l) {
      const double c = normal(rng);
      for (int j = 0; j < surf.size(); ++j) f[j] += c * std::legendre(l, std::cos(grid.node(j)));
    }
    return f;
  }
  const auto& grid = *surf.sphere_grid();
  for (int l = 0; l <= 3; ++l)
    for (int m = -l; m <= l; ++m) {
      const double c = normal(rng);
      for (int j = 0; j < grid.n_theta(); ++j)
        for (int k = 0; k < grid.n_phi(); ++k) {
          f[grid.index(j, k)] += c * real_harmonic(l, m, grid.theta(j), grid.phi(k));
        }
    }
  return f;
}

std::vector<double> project_volume_preserving(const DiscreteHypersurface& surf,
                                              std::span<const double> f, const RadialWeight& psi) {
  require_size(surf, f);
  const auto w = weight_field(surf, psi);
  std::vector<double> fw(surf.size());
  for (int a = 0; a < surf.size(); ++a) fw[a] = f[a] * w[a];
  const double shift = integrate(surf, fw) / integrate(surf, w);
  std::vector<double> out(f.begin(), f.end());
  for (auto& x : out) x -= shift;
  return out;
}

CriticalPointReport critical_point_check(const DiscreteHypersurface& surf,
                                         const ExtrinsicData& data, const RadialWeight& psi,
                                         int fields, std::uint64_t seed, double tolerance) {
  const int n = data.n;
  const auto h = data.mean_curvature(1);
  const auto w = weight_field(surf, psi);
  CriticalPointReport rep;
  rep.fields = fields;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo, big = 0.0;
  for (int a = 0; a < surf.size(); ++a) {
    const double q = h[a] / w[a];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    big = std::max(big, std::abs(q));
  }
  rep.spread = big > 0.0 ? (hi - lo) / big : 0.0;
  rep.proportional = rep.spread <= tolerance;
  rep.constant = 0.5 * (lo + hi);

  const double h0 = mean_curvature_constant(surf, data, psi);
  auto area_scale = [&](const std::vector<double>& f) {
    std::vector<double> m(surf.size());
    for (int a = 0; a < surf.size(); ++a) m[a] = n * std::abs(h[a] * f[a]);
    return integrate(surf, m);
  };
  VariationSpec spec;
  spec.psi = psi;
  spec.t_steps.clear();
  for (int i = 0; i < fields; ++i) {
    const auto raw = random_field(surf, seed + static_cast<std::uint64_t>(i));
    spec.f = project_volume_preserving(surf, raw, psi);
    const double ap = area_derivative(surf, data, spec).analytic;
    rep.max_area_derivative = std::max(rep.max_area_derivative, std::abs(ap));
    rep.max_area_derivative_relative =
        std::max(rep.max_area_derivative_relative, std::abs(ap) / std::max(area_scale(spec.f), 1e-300));

    spec.f = raw;
    const auto jd = j_derivative(surf, data, spec);
    std::vector<double> m(surf.size());
    for (int a = 0; a < surf.size(); ++a) m[a] = n * std::abs(raw[a]) * (std::abs(h[a]) + std::abs(h0) * w[a]);
    rep.max_j_relative = std::max(rep.max_j_relative, std::abs(jd.value) / std::max(integrate(surf, m), 1e-300));
  }

  spec.f = witness_field(surf, data, psi);
  rep.witness_area_derivative = area_derivative(surf, data, spec).analytic;
  std::vector<double> sq(surf.size());
  for (int a = 0; a < surf.size(); ++a) sq[a] = n * spec.f[a] * spec.f[a] * w[a];
  rep.witness_oracle = integrate(surf, sq);
  std::vector<double> hsq(surf.size());
  for (int a = 0; a < surf.size(); ++a) hsq[a] = n * h[a] * h[a] / w[a];
  const double oracle_floor = tolerance * integrate(surf, hsq);
  rep.witness_bounded_away =
      rep.witness_oracle > oracle_floor && std::abs(rep.witness_area_derivative) >= 0.1 * rep.witness_oracle;

  rep.consistent = rep.proportional
                       ? rep.max_area_derivative_relative <= tolerance && rep.max_j_relative <= tolerance
                       : rep.witness_bounded_away;
  return rep;
}

}  // namespace warpgeo
