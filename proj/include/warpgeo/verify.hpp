#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "warpgeo/ambient.hpp"
#include "warpgeo/surface.hpp"

namespace warpgeo {

/// How a check's normalized value is judged.
enum class Comparison {
  /// |value| / max(scale, floor) <= tolerance.
  Equality,
  /// value / max(scale, floor) >= -tolerance.
  NonNegative,
};

struct CheckResult {
  static constexpr double kFloor = 1e-14;

  std::string name;
  double value = 0.0;
  double scale = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::Equality;
  bool passed = false;
  std::optional<double> convergence_order;
  /// False when the statement's hypotheses do not cover the surface; the value is still
  /// computed and reported.
  bool applicable = true;
  std::string note;

  double normalized() const;
  /// Recomputes `passed` from value, scale and tolerance.
  void judge();
};

CheckResult make_check(std::string name, double value, double scale, double tolerance,
                       Comparison comparison = Comparison::Equality);

/// Nodewise integrands of the integral formula for sigma_k:
///   gradient  = -(n-k) <grad sigma_k, lambda d_r>
///   newton    = ((n-k) sigma_1 sigma_k - n(k+1) sigma_{k+1}) u
///   curvature = -n sum_{j != p} Rm(nu, e_p, e_j, e_p) <lambda d_r, e_j> sigma_{k-1;jp}
struct IntegralFormulaTerms {
  std::vector<double> gradient;
  std::vector<double> newton;
  std::vector<double> curvature;
  /// Sum of the absolute values of every summand before cancellation; the residual scale.
  std::vector<double> magnitude;
};

/// Throws std::out_of_range unless 1 <= k <= n (sigma_{n+1} := 0).
IntegralFormulaTerms integral_formula_terms(const DiscreteHypersurface& surf,
                                            const ExtrinsicData& data, int k);

CheckResult integral_formula_residual(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                      int k, double tolerance = 1e-3);
CheckResult integral_formula_residual(const DiscreteHypersurface& surf, int k,
                                      double tolerance = 1e-3);

/// The k = 1 formula assembled with the ambient Ricci tensor:
///   -n(n-1) <grad H, lambda d_r> + ((n-1) sigma_1^2 - 2n sigma_2) u - n Ric(nu, lambda d_r^T).
CheckResult k1_formula_residual(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                double tolerance = 1e-3);

/// max over nodes of |Ric(nu, lambda d_r^T) + u (n-1)(eps + lambda lambda'' - lambda'^2) |nu^P|^2|.
CheckResult ricci_term_identity(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                double tolerance = 1e-8);

/// Samples of the ambient conditions on (0, r_max), or (0, max(10, 2 r_surf)) when r_max is
/// infinite.
ConditionReport ambient_conditions(const AmbientSpace& ambient, double surface_r_max = 0.0);

/// gap = int H_k u - int H_{k-1} lambda', NonNegative comparison. Not applicable unless the
/// surface is star-shaped and the ambient satisfies (C1)-(C4) with C4 allowed to be weak.
CheckResult minkowski_gap(const DiscreteHypersurface& surf, const ExtrinsicData& data, int k,
                          double tolerance = 1e-8);

/// gap = int lambda'/H_1 - int u, NonNegative comparison. Throws std::domain_error when
/// H_1 <= 0 at some node. Not applicable unless embedded with (C1)-(C4), C4 weak allowed.
CheckResult heintze_karcher_gap(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                double tolerance = 1e-8);

enum class SliceCondition {
  /// H^{-alpha} = u
  HAlpha,
  /// H_k^{-alpha} = u
  HkAlpha,
  /// H_k^{-alpha} lambda' = u
  HkAlphaLambdaPrime,
};

std::string to_string(SliceCondition c);
SliceCondition parse_slice_condition(const std::string& name);

/// Residual of the slice equation at r: H_k(slice)^{-alpha} (lambda' or 1) - lambda.
double slice_equation(const AmbientSpace& ambient, SliceCondition condition, int k, double alpha,
                      double r);

struct SliceSolution {
  std::vector<double> roots;
  /// The equation vanishes identically on the sampled range.
  bool degenerate = false;
  /// Per root: max over nodes of |H_k^{-alpha} (lambda') - u| / u on a meshed slice.
  std::vector<double> pointwise_residual;
  std::string message;
};

/// Solves the slice equation by a scan over (0, r_max) followed by TOMS 748 bracketing to
/// machine precision. Throws std::invalid_argument for alpha <= 0, k outside [1, n], or
/// alpha < 1/k for the lambda' condition.
SliceSolution slice_equation_solve(const AmbientSpace& ambient, SliceCondition condition, int k,
                                   double alpha, int verify_nodes = 64);

enum class Theorem { NablaH, NablaHk, CorHphi, CorHkphi, CorHalph, CorHkalph, CorHkconst, Hklambda };

std::string to_string(Theorem t);
Theorem parse_theorem(const std::string& name);

struct Hypothesis {
  std::string name;
  bool holds = false;
  double margin = 0.0;
};

struct TheoremReport {
  Theorem theorem = Theorem::NablaH;
  std::vector<Hypothesis> hypotheses;
  bool hypotheses_hold = false;
  std::string conclusion;  // "umbilic" or "slice"
  bool conclusion_holds = false;
  double conclusion_margin = 0.0;
  /// False only when every hypothesis holds and the conclusion fails.
  bool consistent() const { return !hypotheses_hold || conclusion_holds; }
};

struct TheoremOptions {
  int k = 1;
  double alpha = 1.0;
  /// Radial function Phi for the H_k = Phi(r) corollaries. When absent, the hypothesis is that
  /// H_k is a non-increasing function of r over the nodes.
  std::function<double(double)> phi;
  /// Pointwise tolerance for curvature conditions, relative to the field's magnitude.
  double condition_tol = 1e-6;
  /// Absolute tolerance on the umbilic deficit sum_i (kappa_i - H)^2.
  double umbilic_tol = 1e-6;
};

/// Evaluates the hypotheses and the conclusion of a statement on a meshed surface. Throws
/// std::invalid_argument on theorem/parameter mismatch (k outside the admissible range,
/// alpha <= 0).
TheoremReport theorem_check(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                            Theorem theorem, const TheoremOptions& options);

/// (max r - min r) <= 1e-8 (1 + max |r|) over nodes.
bool is_slice(const DiscreteHypersurface& surf, double* spread = nullptr);

/// Mean curvature of the ellipsoid y_1^2 + ... + y_n^2 + y_{n+1}^2 / a^2 = 1 as a function
/// of the Euclidean distance r from the center.
double ellipsoid_mean_curvature(double a, int n, double r);
double ellipsoid_mean_curvature_derivative(double a, int n, double r);

struct EllipsoidReport {
  double a = 0.0;
  int n = 0;
  int nodes = 0;
  /// max over nodes of |H_mesh - H(r)|.
  double closed_form_error = 0.0;
  double pole_h = 0.0;
  double equator_h = 0.0;
  Eigen::VectorXd equator_kappa;
  double equator_deficit = 0.0;
  /// min of Phi'(r) over sampled r strictly between 1 and a.
  double min_phi_derivative = 0.0;
  bool phi_increasing = false;
  /// min over nodes with |cos t| < 0.9 of the umbilic deficit.
  double min_interior_deficit = 0.0;
  bool star_shaped = false;
  TheoremReport cor_hphi;
  std::string note;
};

/// Throws std::invalid_argument for n < 2 or a <= 0.
EllipsoidReport ellipsoid_counterexample(double a, int n, int n_s);

struct ConvergenceStudy {
  std::vector<int> levels;
  std::vector<CheckResult> results;
  /// Successive-ratio orders log(e_i / e_{i+1}) / log(N_{i+1} / N_i); NaN when undefined.
  std::vector<double> pair_orders;
  /// Minimum order over pairs with both residuals above the floor; NaN when no such pair or
  /// when the residuals are not monotone.
  double order = 0.0;
  bool saturated = false;
  bool monotone = true;
};

/// Runs `check` at each resolution (at least 3) and attaches the order to the finest result.
ConvergenceStudy convergence_study(const std::function<CheckResult(int)>& check,
                                   const std::vector<int>& levels, double floor = 1e-12);

}  // namespace warpgeo
