#include "warpgeo/ambient.hpp"

#include <cmath>
#include <stdexcept>

namespace warpgeo {

namespace {

using Christoffel = std::vector<Eigen::MatrixXd>;

// Gamma^a_{bc} from central differences of the chart metric.
Christoffel fd_christoffel(const PolarChart& chart, const Eigen::VectorXd& x, double h) {
  const int d = chart.dim();
  const Eigen::MatrixXd g = chart.metric_diagonal(x).asDiagonal();
  const Eigen::MatrixXd g_inv = g.inverse();

  std::vector<Eigen::MatrixXd> dg(d);  // dg[c](a, b) = d_c g_ab
  for (int c = 0; c < d; ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    const Eigen::MatrixXd gp = chart.metric_diagonal(xp).asDiagonal();
    const Eigen::MatrixXd gm = chart.metric_diagonal(xm).asDiagonal();
    dg[c] = (gp - gm) / (2.0 * h);
  }

  Christoffel gamma(d, Eigen::MatrixXd::Zero(d, d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        double s = 0.0;
        for (int e = 0; e < d; ++e) {
          s += g_inv(a, e) * (dg[b](e, c) + dg[c](e, b) - dg[e](b, c));
        }
        gamma[a](b, c) = 0.5 * s;
      }
  return gamma;
}

void require_regular_chart(const AmbientSpace& space, const Eigen::VectorXd& x, double h) {
  const double reach = 2.0 * h;
  if (x(0) - reach <= 0.0 || x(0) + reach >= space.profile().r_max()) {
    throw std::domain_error("finite-difference stencil leaves the radial domain");
  }
  if (std::abs(sn_eps(space.epsilon(), x(1))) < 10.0 * reach) {
    throw std::domain_error("chart singularity: sn(theta_1) vanishes near the evaluation point");
  }
  for (int j = 2; j < x.size(); ++j) {
    if (std::abs(std::sin(x(j))) < 10.0 * reach) {
      throw std::domain_error("chart singularity: sin(theta_" + std::to_string(j) + ") vanishes");
    }
  }
}

}  // namespace

double riemann_finite_difference(const AmbientSpace& space, const Eigen::VectorXd& coords,
                                 const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                 const Eigen::VectorXd& x3, const Eigen::VectorXd& x4,
                                 const FiniteDifferenceOptions& opts) {
  const PolarChart chart(space);
  const int d = chart.dim();
  if (coords.size() != d) throw std::invalid_argument("chart point has wrong dimension");
  const double h = opts.h;
  const double lambda = space.eval(coords(0)).lambda;
  if (h < opts.min_h * std::max(lambda, 1e-300) || h < opts.min_h) {
    throw std::invalid_argument("finite-difference step below the cancellation threshold");
  }
  require_regular_chart(space, coords, h);

  const Christoffel gamma = fd_christoffel(chart, coords, h);
  std::vector<Christoffel> dgamma(d);  // dgamma[c][a](b, e) = d_c Gamma^a_{be}
  for (int c = 0; c < d; ++c) {
    Eigen::VectorXd xp = coords, xm = coords;
    xp(c) += h;
    xm(c) -= h;
    const Christoffel gp = fd_christoffel(chart, xp, h);
    const Christoffel gm = fd_christoffel(chart, xm, h);
    dgamma[c].resize(d);
    for (int a = 0; a < d; ++a) dgamma[c][a] = (gp[a] - gm[a]) / (2.0 * h);
  }

  const Eigen::VectorXd g = chart.metric_diagonal(coords);
  double total = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e4 = 0; e4 < d; ++e4) {
          const double weight = x1(a) * x2(b) * x3(c) * x4(e4);
          if (weight == 0.0) continue;
          // R^a_{b c d} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
          double r_up = dgamma[c][a](e4, b) - dgamma[e4][a](c, b);
          for (int e = 0; e < d; ++e) {
            r_up += gamma[a](c, e) * gamma[e](e4, b) - gamma[a](e4, e) * gamma[e](c, b);
          }
          total += weight * g(a) * r_up;
        }
  return total;
}

RichardsonResult riemann_richardson(const AmbientSpace& space, const Eigen::VectorXd& coords,
                                    const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                    const Eigen::VectorXd& x3, const Eigen::VectorXd& x4,
                                    double h) {
  const PolarChart chart(space);
  RichardsonResult out;
  out.exact = space.riemann(coords(0), chart.decompose(coords, x1), chart.decompose(coords, x2),
                            chart.decompose(coords, x3), chart.decompose(coords, x4));
  FiniteDifferenceOptions opts;
  opts.h = h;
  out.value_h = riemann_finite_difference(space, coords, x1, x2, x3, x4, opts);
  opts.h = h / 2;
  out.value_h2 = riemann_finite_difference(space, coords, x1, x2, x3, x4, opts);
  opts.h = h / 4;
  out.value_h4 = riemann_finite_difference(space, coords, x1, x2, x3, x4, opts);

  const double err_h = std::abs(out.value_h - out.exact);
  const double err_h2 = std::abs(out.value_h2 - out.exact);
  const double floor = 1e-10 * std::max(1.0, std::abs(out.exact));
  out.at_floor = err_h < floor && err_h2 < floor;
  out.ratio = out.at_floor ? std::nan("") : err_h / err_h2;
  const double denom = out.value_h2 - out.value_h4;
  out.self_ratio = denom == 0.0 ? std::nan("") : (out.value_h - out.value_h2) / denom;
  return out;
}

}  // namespace warpgeo
