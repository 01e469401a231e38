#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace warpgeo {

/// How the warping function behaves at r = 0.
///   ConePoint: lambda(0) = 0, lambda'(0) = 1 (space forms; smooth closure with a round fiber).
///   Horizon:   lambda'(0) = 0, lambda''(0) > 0 (Schwarzschild-type ends).
enum class BoundaryMode { ConePoint, Horizon };

std::string to_string(BoundaryMode mode);

struct ProfileValues {
  double lambda = 0.0;
  double dlambda = 0.0;
  double ddlambda = 0.0;
};

/// A smooth shape function phi_s(s) of the fiber radius s = lambda(r), with
/// lambda'(r) = sqrt(phi_s(lambda)) and lambda''(r) = phi_s'(lambda) / 2.
struct ShapeFunction {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
};

/// Radial warping function lambda on [0, r_max).
///
/// Closed-form profiles evaluate lambda and its derivatives directly. Shape-function
/// profiles are parametrized by the fiber radius s; r(s) = int_{s0}^{s} ds / sqrt(phi_s)
/// is evaluated by Gauss-Legendre quadrature after the substitution s = s0 + w^2,
/// which removes the square-root singularity at the horizon, and inverted by
/// safeguarded Newton iteration.
class WarpingProfile {
 public:
  using Evaluator = std::function<ProfileValues(double)>;

  static WarpingProfile closed_form(std::string name, Evaluator eval,
                                    std::function<double(double)> primitive,
                                    double r_max, BoundaryMode mode);

  /// s0 must be a simple root of phi with dphi(s0) > 0. If s_max is finite it must be
  /// the next simple root of phi (dphi(s_max) < 0); otherwise phi stays positive on (s0, inf).
  static WarpingProfile shape_function(std::string name, ShapeFunction shape, double s0,
                                       double s_max = std::numeric_limits<double>::infinity());

  /// (lambda, lambda', lambda''). Throws std::domain_error outside [0, r_max).
  ProfileValues eval(double r) const;

  /// int_0^r lambda(s) ds.
  double primitive(double r) const;

  double r_max() const { return r_max_; }
  BoundaryMode mode() const { return mode_; }
  bool is_shape_function() const { return static_cast<bool>(shape_); }
  const std::string& name() const { return name_; }

  /// phi_s(lambda(r)); only for shape-function profiles.
  double shape_value(double s) const;
  double horizon_radius() const { return s0_; }

 private:
  struct ShapeState;

  WarpingProfile() = default;

  std::string name_;
  Evaluator eval_;
  std::function<double(double)> primitive_;
  std::shared_ptr<const ShapeState> shape_;
  double r_max_ = std::numeric_limits<double>::infinity();
  double s0_ = 0.0;
  BoundaryMode mode_ = BoundaryMode::ConePoint;
};

/// Tangent vector split as v = radial * d_r + v^P, with the fiber part given in a
/// g^P-orthonormal frame (so a fiber-unit vector has ambient length lambda).
struct TangentDecomposition {
  double radial = 0.0;
  Eigen::VectorXd fiber;

  static TangentDecomposition radial_unit(int n);
  static TangentDecomposition fiber_unit(int n, int index);
};

TangentDecomposition operator+(const TangentDecomposition& a, const TangentDecomposition& b);
TangentDecomposition operator*(double s, const TangentDecomposition& a);

/// Kulkarni-Nomizu product of two symmetric bilinear forms evaluated on four vectors.
template <class H, class W, class V>
double kulkarni_nomizu(const H& h, const W& w, const V& x1, const V& x2, const V& x3,
                       const V& x4) {
  return h(x1, x3) * w(x2, x4) + h(x2, x4) * w(x1, x3) - h(x1, x4) * w(x2, x3) -
         h(x2, x3) * w(x1, x4);
}

struct ConditionReport {
  BoundaryMode mode = BoundaryMode::ConePoint;
  // C1 or, in cone-point mode, lambda(0) = 0 and lambda'(0) = 1.
  bool c1 = false;
  bool cone_point = false;
  double c1_margin = 0.0;
  bool c2 = false;
  double c2_margin = 0.0;
  bool c3 = false;
  double c3_margin = 0.0;
  bool c4 = false;
  bool c4_weak = false;
  double c4_margin = 0.0;
  /// eps - lambda'^2 + lambda lambda'' >= 0, the fiber Ricci hypothesis for constant curvature fibers.
  bool ricci_fiber = false;
  double ricci_fiber_margin = 0.0;

  bool all_c1_to_c4() const { return (c1 || cone_point) && c2 && c3 && c4; }
};

/// Warped product [0, r_max) x_lambda P^n with P of constant sectional curvature epsilon.
class AmbientSpace {
 public:
  AmbientSpace(WarpingProfile profile, int n, double epsilon, std::string name = {});

  const WarpingProfile& profile() const { return profile_; }
  int n() const { return n_; }
  double epsilon() const { return epsilon_; }
  const std::string& name() const { return name_; }

  ProfileValues eval(double r) const { return profile_.eval(r); }

  double metric(double r, const TangentDecomposition& x, const TangentDecomposition& y) const;

  /// nabla_u v with v extended by constant components in a fiber frame that is geodesic
  /// at the evaluation point.
  TangentDecomposition connection(double r, const TangentDecomposition& u,
                                  const TangentDecomposition& v) const;

  /// (0,4) curvature, Rm(X,Y,X,Y) = K(X,Y) |X ^ Y|^2.
  double riemann(double r, const TangentDecomposition& x1, const TangentDecomposition& x2,
                 const TangentDecomposition& x3, const TangentDecomposition& x4) const;

  double ricci(double r, const TangentDecomposition& u, const TangentDecomposition& v) const;

  double sectional_curvature(double r, const TangentDecomposition& x,
                             const TangentDecomposition& y) const;

  /// lambda''/lambda + (eps - lambda'^2)/lambda^2.
  double c4_function(double r) const;
  /// 2 lambda''/lambda - (n-1)(eps - lambda'^2)/lambda^2.
  double c3_function(double r) const;

  ConditionReport check_conditions(const std::vector<double>& r_grid) const;

 private:
  void require_interior(double r) const;

  WarpingProfile profile_;
  int n_;
  double epsilon_;
  std::string name_;
};

struct AmbientParams {
  double m = 1.0;
  double c = 0.0;
  double q = 0.3;
};

/// Catalog: "euclidean", "sphere", "hyperbolic", "dss", "rn". Throws std::invalid_argument
/// for unknown names or parameters without a horizon.
AmbientSpace make_ambient(const std::string& kind, int n, const AmbientParams& params = {});

/// Polar chart (r, theta_1, ..., theta_n) with
///   g = dr^2 + lambda^2 (d theta_1^2 + sn_eps(theta_1)^2 (d theta_2^2 + sin^2 theta_2 (...))).
/// The metric is diagonal in this chart.
class PolarChart {
 public:
  explicit PolarChart(const AmbientSpace& space) : space_(&space) {}

  int dim() const { return space_->n() + 1; }
  const AmbientSpace& space() const { return *space_; }

  Eigen::VectorXd metric_diagonal(const Eigen::VectorXd& x) const;
  /// gamma[a](b, c) = Gamma^a_{bc}, built from the warped connection and the fiber's own
  /// polar-chart connection.
  std::vector<Eigen::MatrixXd> christoffel(const Eigen::VectorXd& x) const;

  /// Coordinate components -> radial/fiber-orthonormal split, and back.
  TangentDecomposition decompose(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;
  Eigen::VectorXd compose(const Eigen::VectorXd& x, const TangentDecomposition& v) const;

 private:
  /// P_i(theta) with g_ii = lambda^2 P_i for i >= 1.
  Eigen::VectorXd fiber_factors(const Eigen::VectorXd& x) const;

  const AmbientSpace* space_;
};

double sn_eps(double eps, double t);
double cn_eps(double eps, double t);

struct FiniteDifferenceOptions {
  double h = 1e-3;
  /// Steps below this, relative to local lambda, are rejected as cancellation-dominated.
  double min_h = 2e-5;
};

/// Independent oracle: metric values only, Christoffel symbols by central differences of
/// the metric, curvature by central differences of those Christoffel symbols.
/// Vectors are given in chart coordinate components. Error is O(h^2).
double riemann_finite_difference(const AmbientSpace& space, const Eigen::VectorXd& coords,
                                 const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                 const Eigen::VectorXd& x3, const Eigen::VectorXd& x4,
                                 const FiniteDifferenceOptions& opts = {});

struct RichardsonResult {
  double exact = 0.0;
  double value_h = 0.0;
  double value_h2 = 0.0;
  double value_h4 = 0.0;
  /// |err(h)| / |err(h/2)|; NaN when both errors are at the round-off floor.
  double ratio = 0.0;
  bool at_floor = false;
  /// (v_h - v_h2)/(v_h2 - v_h4): the self-consistency ratio that flags cancellation.
  double self_ratio = 0.0;
};

/// Closed form vs finite differences at h, h/2, h/4.
RichardsonResult riemann_richardson(const AmbientSpace& space, const Eigen::VectorXd& coords,
                                    const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                    const Eigen::VectorXd& x3, const Eigen::VectorXd& x4,
                                    double h = 1e-3);

}  // namespace warpgeo
