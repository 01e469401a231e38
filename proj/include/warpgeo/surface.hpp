#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "warpgeo/ambient.hpp"
#include "warpgeo/grid.hpp"
#include "warpgeo/symfunc.hpp"

namespace warpgeo {

/// Meridian values and t-derivatives.
struct MeridianPoint {
  double r = 0.0;
  double dr = 0.0;
  double ddr = 0.0;
  double theta = 0.0;
  double dtheta = 0.0;
  double ddtheta = 0.0;
};

/// Closed-form meridian t in [0, pi] -> (r, theta) in the half-plane, theta the polar angle
/// on the round fiber. Rotating about the axis theta in {0, pi} gives a closed hypersurface.
struct MeridianCurve {
  std::string name;
  std::function<MeridianPoint(double)> eval;

  static MeridianCurve circle(double radius);
  static MeridianCurve slice(double r0);
  /// r = r0 + amplitude cos(mode t), theta = t.
  static MeridianCurve perturbed_slice(double r0, double amplitude, int mode);
  /// Euclidean-model ellipse with fiber semi-axis 1 and axis semi-axis a.
  static MeridianCurve ellipse(double a);
  /// Euclidean-model circle of the given radius centered at distance `offset` along the axis.
  static MeridianCurve offset_circle(double radius, double offset);
};

/// Real spherical-harmonic-style term: P_l^|m|(cos theta) times cos(m phi) (m >= 0) or
/// sin(|m| phi) (m < 0).
struct HarmonicTerm {
  int l = 0;
  int m = 0;
  double coeff = 0.0;
};

/// rho(theta, phi) = base + sum of harmonic terms.
struct RadialFunction {
  std::string name;
  double base = 1.0;
  std::vector<HarmonicTerm> terms;

  double operator()(double theta, double phi) const;
};

double real_harmonic(int l, int m, double theta, double phi);

enum class SurfaceKind { Rotational, Graph };

/// Closed hypersurface sampled on a structured grid.
///
/// Rotational surfaces store one node per meridian sample at the chart point
/// (r, theta, pi/2, ..., pi/2); the orbit volume is folded into the weights. Graph surfaces
/// (n = 2 only) store r = rho on a latitude-longitude grid.
class DiscreteHypersurface {
 public:
  SurfaceKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const AmbientSpace& ambient() const { return *ambient_; }
  std::shared_ptr<const AmbientSpace> ambient_ptr() const { return ambient_; }
  int n() const { return ambient_->n(); }
  int size() const { return static_cast<int>(weights_.size()); }
  /// Grid resolution parameter: N_s for rotational, N_phi for graphs.
  int resolution() const;

  const std::optional<MeridianGrid>& meridian_grid() const { return meridian_; }
  const std::optional<SphereGrid>& sphere_grid() const { return sphere_; }
  const std::optional<MeridianCurve>& meridian_curve() const { return curve_; }

  /// Chart point of node a, dimension n + 1.
  Eigen::VectorXd coords(int a) const { return coords_.col(a); }
  /// d x n matrix of tangent vectors d_i x in chart components.
  Eigen::MatrixXd tangents(int a) const;
  /// d_i d_j x in chart components.
  Eigen::VectorXd second(int a, int i, int j) const;

  const std::vector<double>& weights() const { return weights_; }
  /// Angular position used by the node dump.
  double theta(int a) const { return angles_(0, a); }
  double phi(int a) const { return angles_(1, a); }
  double r(int a) const { return coords_(0, a); }

  /// Derivative of a per-node field along surface coordinate `dir`. Directions without a
  /// stencil (orbit directions of rotational surfaces) give zero. `parity` is the field's
  /// behaviour under reflection through the poles.
  std::vector<double> derivative(std::span<const double> field, int dir, double parity = 1.0) const;

  /// Meridian polyline has no self-intersection (always true for graphs).
  bool embedded() const { return embedded_; }

  /// Orbit volume factor folded into the weights (omega_{n-1} for rotational, 1 for graphs).
  double orbit_factor() const { return orbit_factor_; }
  /// Base quadrature weights for the angular measure (before the metric density).
  const std::vector<double>& base_weights() const { return base_; }

  friend DiscreteHypersurface build_rotational(const AmbientSpace&, const MeridianCurve&, int);
  friend DiscreteHypersurface build_rotational_nodes(const AmbientSpace&, std::string,
                                                     std::span<const double>,
                                                     std::span<const double>);
  friend DiscreteHypersurface build_radial_graph(const AmbientSpace&, const RadialFunction&,
                                                 int, int);
  friend DiscreteHypersurface build_graph_nodes(const AmbientSpace&, std::string, int, int,
                                                std::span<const double>);

 private:
  void finish_weights();

  SurfaceKind kind_ = SurfaceKind::Rotational;
  std::string name_;
  std::shared_ptr<const AmbientSpace> ambient_;
  std::optional<MeridianGrid> meridian_;
  std::optional<SphereGrid> sphere_;
  std::optional<MeridianCurve> curve_;
  Eigen::MatrixXd coords_;
  std::vector<Eigen::MatrixXd> tangent_;  // tangent_[i]: d x N
  std::vector<Eigen::MatrixXd> second_;   // second_[i * s + j] for stencil directions i, j < s
  Eigen::MatrixXd angles_;                // 2 x N
  std::vector<double> base_;
  std::vector<double> weights_;
  double orbit_factor_ = 1.0;
  bool embedded_ = true;
};

/// Rotational hypersurface from a closed-form meridian sampled at N_s cell-centered values of
/// the curve parameter. Requires epsilon = 1. Throws std::domain_error when the meridian
/// leaves (0, r_max) and std::invalid_argument when it does not meet the axis orthogonally.
DiscreteHypersurface build_rotational(const AmbientSpace& ambient, const MeridianCurve& meridian,
                                      int n_s);

/// Rotational hypersurface from node values (r_j, theta_j) on the standard meridian grid.
DiscreteHypersurface build_rotational_nodes(const AmbientSpace& ambient, std::string name,
                                            std::span<const double> r,
                                            std::span<const double> theta);

/// Radial graph r = rho(theta, phi) over the fiber S^2 (ambient n = 2, epsilon = 1).
DiscreteHypersurface build_radial_graph(const AmbientSpace& ambient, const RadialFunction& rho,
                                        int n_theta, int n_phi);

DiscreteHypersurface build_graph_nodes(const AmbientSpace& ambient, std::string name,
                                       int n_theta, int n_phi, std::span<const double> rho);

struct NodeExtrinsic {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  double sqrt_det = 0.0;
  /// Unit normal, chart components and radial/fiber split.
  Eigen::VectorXd nu;
  TangentDecomposition nu_split;
  /// h_ij = <d_i x, nabla_j nu>.
  Eigen::MatrixXd h;
  /// Ascending principal curvatures and g-orthonormal coefficient matrix V:
  /// e_j = sum_i V(i, j) d_i x.
  PrincipalCurvatures kappa;
  Eigen::MatrixXd principal_coeffs;
  /// Principal directions in chart components (d x n).
  Eigen::MatrixXd principal_dirs;
  double r = 0.0;
  ProfileValues profile;
  double u = 0.0;
  double eta = 0.0;
  /// Surface components of the tangential part of d_r.
  Eigen::VectorXd dr_tan;
  Eigen::VectorXd sigma;
  /// Closed-form principal curvatures (rotational surfaces only).
  PrincipalCurvatures kappa_closed;
};

struct ExtrinsicData {
  int n = 0;
  std::vector<NodeExtrinsic> nodes;

  /// Per-node field built from a node accessor.
  template <class F>
  std::vector<double> field(F&& f) const {
    std::vector<double> out(nodes.size());
    for (std::size_t a = 0; a < nodes.size(); ++a) out[a] = f(nodes[a]);
    return out;
  }
  /// H_k = sigma_k / C(n, k) per node.
  std::vector<double> mean_curvature(int k = 1) const;
};

/// Throws std::domain_error for a degenerate induced metric.
ExtrinsicData extrinsic_data(const DiscreteHypersurface& surf);

/// Closed-form meridian and rotational curvatures of a rotational surface at parameter t.
PrincipalCurvatures rotational_closed_form_curvatures(const AmbientSpace& ambient,
                                                      const MeridianPoint& p);

struct GradientField {
  /// Contravariant surface components g^{ij} d_j f.
  std::vector<Eigen::VectorXd> components;
  /// <grad f, d_r>.
  std::vector<double> along_dr;
  /// |grad f|_g.
  std::vector<double> norm;
};

GradientField scalar_gradient(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                              std::span<const double> field);

/// Laplace-Beltrami operator as the divergence of the gradient with metric density weights.
std::vector<double> laplacian(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                              std::span<const double> field);

/// sum_a w_a f_a in node order.
double integrate(const DiscreteHypersurface& surf, std::span<const double> field);

struct UmbilicDeficit {
  std::vector<double> per_node;
  double max = 0.0;
};

/// sum_i (kappa_i - sigma_1 / n)^2.
UmbilicDeficit umbilic_deficit(const ExtrinsicData& data);

struct HypothesisFlags {
  bool star_shaped = false;
  double star_margin = 0.0;  // min <d_r, nu>
  bool k_convex = false;
  double k_convex_margin = 0.0;  // min over nodes and i <= k of sigma_i
  bool strictly_convex = false;
  double convex_margin = 0.0;  // min kappa
  bool grad_condition = false;
  double grad_margin = 0.0;  // max <grad H_k, d_r>
  std::vector<double> grad_along_dr;
};

HypothesisFlags hypothesis_flags(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                 int k, double tol_grad = 1e-8);

struct GradientIdentityResiduals {
  /// max |grad eta - lambda d_r^T|_g
  double eta_gradient = 0.0;
  /// max |grad u - h(lambda d_r^T, .)|_g
  double u_gradient = 0.0;
  /// max |Lap eta - (n lambda' - sigma_1 u)|
  double laplacian = 0.0;
};

GradientIdentityResiduals gradient_identity_check(const DiscreteHypersurface& surf,
                                                  const ExtrinsicData& data);

/// Plain-text node dump: `theta phi r weight kappa_1 .. kappa_n u`.
void write_node_dump(std::ostream& out, const DiscreteHypersurface& surf,
                     const ExtrinsicData& data);

}  // namespace warpgeo
