#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "warpgeo/surface.hpp"

namespace warpgeo {

/// Radial weight Psi(r) on the ambient; psi = Psi restricted to the surface.
struct RadialWeight {
  std::string name = "zero";
  std::function<double(double)> psi = [](double) { return 0.0; };

  double operator()(double r) const { return psi(r); }

  static RadialWeight zero();
  static RadialWeight linear(double c);     // c r
  static RadialWeight quadratic(double c);  // c r^2
  /// "zero", "linear:<c>" or "quadratic:<c>". Throws std::invalid_argument otherwise.
  static RadialWeight parse(const std::string& spec);
};

/// Normal variation dX/dt = -f nu with per-node speed f.
struct VariationSpec {
  std::vector<double> f;
  RadialWeight psi;
  /// Central-difference step sizes, typically dt and dt / 2.
  std::vector<double> t_steps{1e-2, 5e-3};
};

struct DerivativeEstimate {
  double analytic = 0.0;
  std::vector<double> steps;
  std::vector<double> finite_diff;
  /// finite_diff - analytic per step.
  std::vector<double> mismatch;
  /// mismatch[0] / mismatch[1] when two steps are given; about 4 for dt-halving.
  double halving_ratio = 0.0;
};

/// Weighted volume enclosed between the surface and r = 0, int e^Psi dvol, computed as
/// int_M G(r) (pullback of the fiber volume form) with G' = e^Psi lambda^n, G(0) = 0.
double enclosed_weighted_volume(const DiscreteHypersurface& surf, const RadialWeight& psi);

/// V'(0) = int f e^psi dmu. The finite difference differences the enclosed weighted volume
/// of the surfaces flowed to -dt and +dt (V(t) counts volume swept inward as positive).
/// Throws std::invalid_argument for a size mismatch and std::domain_error when a flowed
/// surface leaves the ambient domain.
DerivativeEstimate weighted_volume_derivative(const DiscreteHypersurface& surf,
                                              const ExtrinsicData& data, const VariationSpec& spec);

/// A'(0) = -int n H f dmu (outward normal, sphere shrinks for f > 0). The finite difference
/// re-meshes the flowed surfaces and differences their areas.
DerivativeEstimate area_derivative(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                   const VariationSpec& spec);

struct JDerivative {
  double h0 = 0.0;
  /// int n f (-H + H0 e^psi) dmu
  double value = 0.0;
  /// A'(0) + n H0 V'(0) from the analytic derivatives.
  double cross_check = 0.0;
};

/// H0 = int H dmu / int e^psi dmu.
double mean_curvature_constant(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                               const RadialWeight& psi);

JDerivative j_derivative(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                         const VariationSpec& spec);

/// f = -H e^{-psi} + H0, for which int f e^psi dmu = 0.
std::vector<double> witness_field(const DiscreteHypersurface& surf, const ExtrinsicData& data,
                                  const RadialWeight& psi);

/// Random smooth speed: real spherical harmonics with l <= 3 (graphs) or Legendre
/// polynomials P_l(cos t), l <= 3 (rotational), standard normal coefficients.
std::vector<double> random_field(const DiscreteHypersurface& surf, std::uint64_t seed);

/// Subtracts the constant that makes int f e^psi dmu vanish.
std::vector<double> project_volume_preserving(const DiscreteHypersurface& surf,
                                              std::span<const double> f, const RadialWeight& psi);

struct CriticalPointReport {
  /// (i): H e^{-psi} constant; spread = (max - min) / max |.|.
  bool proportional = false;
  double spread = 0.0;
  double constant = 0.0;
  /// (ii): max over random volume-preserving fields of |A'(0)|, absolute and relative to
  /// int n |H f| dmu.
  int fields = 0;
  double max_area_derivative = 0.0;
  double max_area_derivative_relative = 0.0;
  /// (iii): max over random unconstrained fields of |J'(0)| relative to int n |H f| dmu.
  double max_j_relative = 0.0;
  /// Witness f = -H e^{-psi} + H0: A'(0) and the oracle int n f^2 e^psi dmu.
  double witness_area_derivative = 0.0;
  double witness_oracle = 0.0;
  bool witness_bounded_away = false;
  /// The three statements agree at tolerance.
  bool consistent = false;
};

CriticalPointReport critical_point_check(const DiscreteHypersurface& surf,
                                         const ExtrinsicData& data, const RadialWeight& psi,
                                         int fields = 20, std::uint64_t seed = 1,
                                         double tolerance = 1e-6);

}  // namespace warpgeo
