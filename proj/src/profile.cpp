#include "warpgeo/ambient.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <stdexcept>

namespace warpgeo {

namespace {

constexpr double kPanelWidth = 0.25;
constexpr double kMeanValueBand = 0.1;

// Composite 20-point Gauss-Legendre on [0, b].
template <class F>
double composite_gauss(const F& f, double b) {
  if (b <= 0.0) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(b / kPanelWidth)));
  const double width = b / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    sum += boost::math::quadrature::gauss<double, 20>::integrate(f, p * width, (p + 1) * width);
  }
  return sum;
}

}  // namespace

std::string to_string(BoundaryMode mode) {
  return mode == BoundaryMode::ConePoint ? "cone-point" : "horizon";
}

struct WarpingProfile::ShapeState {
  ShapeFunction shape;
  double s0 = 0.0;
  double s_max = std::numeric_limits<double>::infinity();
  double s_mid = std::numeric_limits<double>::infinity();
  double r_mid = std::numeric_limits<double>::infinity();
  double r_max = std::numeric_limits<double>::infinity();
  double p_mid = 0.0;  // primitive at s_mid

  bool two_sided() const { return std::isfinite(s_max); }

  // phi(s0 + w^2) / w^2, smooth through w = 0 because s0 is a simple root. Near the root
  // it is evaluated as the mean of phi' over [s0, s0 + w^2], which avoids cancellation.
  double left_quotient(double w) const {
    const double x = w * w;
    if (x < kMeanValueBand) return mean_dphi(s0, x);
    return shape.phi(s0 + x) / x;
  }
  double right_quotient(double v) const {
    const double x = v * v;
    if (x < kMeanValueBand) return -mean_dphi(s_max, -x);
    return shape.phi(s_max - x) / x;
  }
  double mean_dphi(double base, double x) const {
    return boost::math::quadrature::gauss<double, 10>::integrate(
               [&](double tau) { return shape.dphi(base + tau * x); }, 0.0, 1.0);
  }

  double left_r(double w) const {
    return composite_gauss([this](double t) { return 2.0 / std::sqrt(left_quotient(t)); }, w);
  }
  double left_primitive(double w) const {
    return composite_gauss(
        [this](double t) { return 2.0 * (s0 + t * t) / std::sqrt(left_quotient(t)); }, w);
  }
  double right_r(double v) const {
    return composite_gauss([this](double t) { return 2.0 / std::sqrt(right_quotient(t)); }, v);
  }
  double right_primitive(double v) const {
    return composite_gauss(
        [this](double t) { return 2.0 * (s_max - t * t) / std::sqrt(right_quotient(t)); }, v);
  }

  double s_of_r(double r) const {
    using boost::math::tools::newton_raphson_iterate;
    constexpr int digits = 50;
    if (r <= 0.0) return s0;
    if (!two_sided() || r <= r_mid) {
      const double w_cap = two_sided() ? std::sqrt(s_mid - s0) : std::numeric_limits<double>::infinity();
      double w_hi = std::max(1e-3, 0.5 * r * std::sqrt(shape.dphi(s0)));
      while (left_r(w_hi) < r && w_hi < w_cap) w_hi = std::min(2.0 * w_hi, w_cap);
      const double guess = std::min(0.5 * r * std::sqrt(shape.dphi(s0)), w_hi);
      const double w = newton_raphson_iterate(
          [&](double t) {
            return std::make_pair(left_r(t) - r, 2.0 / std::sqrt(left_quotient(t)));
          },
          guess, 0.0, w_hi, digits);
      return s0 + w * w;
    }
    const double target = r_max - r;
    const double v_cap = std::sqrt(s_max - s_mid);
    const double guess = std::min(0.5 * target * std::sqrt(-shape.dphi(s_max)), v_cap);
    const double v = newton_raphson_iterate(
        [&](double t) {
          return std::make_pair(right_r(t) - target, 2.0 / std::sqrt(right_quotient(t)));
        },
        guess, 0.0, v_cap, digits);
    return s_max - v * v;
  }

  double primitive_of_s(double s) const {
    if (!two_sided() || s <= s_mid) return left_primitive(std::sqrt(std::max(0.0, s - s0)));
    return p_mid + right_primitive(std::sqrt(s_max - s_mid)) -
           right_primitive(std::sqrt(std::max(0.0, s_max - s)));
  }
};

WarpingProfile WarpingProfile::closed_form(std::string name, Evaluator eval,
                                           std::function<double(double)> primitive,
                                           double r_max, BoundaryMode mode) {
  WarpingProfile p;
  p.name_ = std::move(name);
  p.eval_ = std::move(eval);
  p.primitive_ = std::move(primitive);
  p.r_max_ = r_max;
  p.mode_ = mode;
  return p;
}

WarpingProfile WarpingProfile::shape_function(std::string name, ShapeFunction shape, double s0,
                                              double s_max) {
  if (!(shape.dphi(s0) > 0.0) || std::abs(shape.phi(s0)) > 1e-10) {
    throw std::invalid_argument("shape function needs a simple root with phi'(s0) > 0 at s0");
  }
  auto state = std::make_shared<ShapeState>();
  state->shape = std::move(shape);
  state->s0 = s0;
  state->s_max = s_max;
  if (state->two_sided()) {
    if (!(s_max > s0) || !(state->shape.dphi(s_max) < 0.0)) {
      throw std::invalid_argument("outer root of the shape function must have phi' < 0");
    }
    state->s_mid = 0.5 * (s0 + s_max);
    const double w_mid = std::sqrt(state->s_mid - s0);
    const double v_mid = std::sqrt(s_max - state->s_mid);
    state->r_mid = state->left_r(w_mid);
    state->r_max = state->r_mid + state->right_r(v_mid);
    state->p_mid = state->left_primitive(w_mid);
  }

  WarpingProfile p;
  p.name_ = std::move(name);
  p.mode_ = BoundaryMode::Horizon;
  p.s0_ = s0;
  p.r_max_ = state->r_max;
  p.shape_ = state;
  return p;
}

double WarpingProfile::shape_value(double s) const {
  if (!shape_) throw std::logic_error("profile '" + name_ + "' has no shape function");
  return shape_->shape.phi(s);
}

ProfileValues WarpingProfile::eval(double r) const {
  if (!(r >= 0.0) || !(r < r_max_)) {
    throw std::domain_error("r = " + std::to_string(r) + " outside [0, " +
                            std::to_string(r_max_) + ") for profile '" + name_ + "'");
  }
  if (!shape_) return eval_(r);

  const double s = shape_->s_of_r(r);
  const double phi = shape_->shape.phi(s);
  if (phi < -1e-12) {
    throw std::domain_error("shape function negative at s = " + std::to_string(s) +
                            ": profile left its admissible band");
  }
  return {s, std::sqrt(std::max(phi, 0.0)), 0.5 * shape_->shape.dphi(s)};
}

double WarpingProfile::primitive(double r) const {
  if (!(r >= 0.0) || !(r < r_max_)) {
    throw std::domain_error("primitive: r = " + std::to_string(r) + " outside profile domain");
  }
  if (!shape_) return primitive_(r);
  return shape_->primitive_of_s(shape_->s_of_r(r));
}

}  // namespace warpgeo
