#pragma once

#include <span>
#include <vector>

namespace warpgeo {

/// Ghost-node rule across a pole for a cell-centered direction on [0, pi].
/// A ghost at mirrored position takes parity * value + shift, with separate shifts at
/// the two ends (the polar angle theta continues as -theta and 2 pi - theta).
struct Reflection {
  double parity = 1.0;
  double left_shift = 0.0;
  double right_shift = 0.0;

  static Reflection even() { return {}; }
  static Reflection odd() { return {-1.0, 0.0, 0.0}; }
  static Reflection polar_angle() { return {-1.0, 0.0, 2.0 * 3.14159265358979323846}; }
};

/// N cell-centered nodes t_j = (j + 1/2) pi / N on a meridian [0, pi].
/// Fourth-order central differences throughout, using pole reflection for ghosts.
class MeridianGrid {
 public:
  explicit MeridianGrid(int size);

  int size() const { return size_; }
  double step() const { return step_; }
  double node(int j) const { return (j + 0.5) * step_; }

  std::vector<double> d1(std::span<const double> v, Reflection rule) const;
  std::vector<double> d2(std::span<const double> v, Reflection rule) const;

  /// Six-point Lagrange interpolation at t in [0, pi], using ghosts near the poles.
  double interpolate(std::span<const double> v, double t, Reflection rule) const;

  /// Weights for int_0^pi F(t) dt where F has parity (-1)^(n-1) under reflection at the
  /// poles: Fejer's first rule divided by sin t when F is odd, midpoint rule when even.
  std::vector<double> base_weights(int n) const;

 private:
  double ghost(std::span<const double> v, int j, Reflection rule) const;

  int size_;
  double step_;
};

/// Latitude-longitude grid on S^2: N_theta cell-centered colatitudes, N_phi (even)
/// longitudes phi_k = 2 pi k / N_phi. Node index = j * N_phi + k.
class SphereGrid {
 public:
  SphereGrid(int n_theta, int n_phi);

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  int size() const { return n_theta_ * n_phi_; }
  double theta(int j) const { return (j + 0.5) * h_theta_; }
  double phi(int k) const { return k * h_phi_; }
  int index(int j, int k) const { return j * n_phi_ + k; }

  std::vector<double> d_theta(std::span<const double> v, double parity = 1.0) const;
  std::vector<double> d_theta2(std::span<const double> v, double parity = 1.0) const;
  std::vector<double> d_phi(std::span<const double> v) const;
  std::vector<double> d_phi2(std::span<const double> v) const;

  /// Weights for int int F d theta d phi with F odd across the poles (F / sin theta smooth):
  /// Fejer in theta, trapezoid in phi.
  std::vector<double> base_weights() const;

 private:
  double at(std::span<const double> v, int j, int k, double parity) const;

  int n_theta_;
  int n_phi_;
  double h_theta_;
  double h_phi_;
};

/// Fejer's first rule on cell-centered nodes: int_{-1}^{1} f(x) dx with x_j = cos t_j.
std::vector<double> fejer_weights(int size);

}  // namespace warpgeo
