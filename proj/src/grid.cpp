#include "warpgeo/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace warpgeo {

namespace {

// f' ~ (f_{-2} - 8 f_{-1} + 8 f_1 - f_2) / 12h
inline double first(double m2, double m1, double p1, double p2, double h) {
  return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
}

// f'' ~ (-f_{-2} + 16 f_{-1} - 30 f_0 + 16 f_1 - f_2) / 12h^2
inline double second(double m2, double m1, double c, double p1, double p2, double h) {
  return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
}

}  // namespace

std::vector<double> fejer_weights(int size) {
  std::vector<double> w(size);
  const double h = M_PI / size;
  for (int j = 0; j < size; ++j) {
    const double t = (j + 0.5) * h;
    double s = 0.0;
    for (int m = 1; m <= size / 2; ++m) s += std::cos(2.0 * m * t) / (4.0 * m * m - 1.0);
    w[j] = 2.0 / size * (1.0 - 2.0 * s);
  }
  return w;
}

MeridianGrid::MeridianGrid(int size) : size_(size), step_(M_PI / size) {
  if (size < 4) throw std::invalid_argument("meridian grid needs at least 4 nodes");
}

double MeridianGrid::ghost(std::span<const double> v, int j, Reflection rule) const {
  if (j < 0) return rule.parity * v[-1 - j] + rule.left_shift;
  if (j >= size_) return rule.parity * v[2 * size_ - 1 - j] + rule.right_shift;
  return v[j];
}

std::vector<double> MeridianGrid::d1(std::span<const double> v, Reflection rule) const {
  std::vector<double> out(size_);
  for (int j = 0; j < size_; ++j) {
    out[j] = first(ghost(v, j - 2, rule), ghost(v, j - 1, rule), ghost(v, j + 1, rule),
                   ghost(v, j + 2, rule), step_);
  }
  return out;
}

std::vector<double> MeridianGrid::d2(std::span<const double> v, Reflection rule) const {
  std::vector<double> out(size_);
  for (int j = 0; j < size_; ++j) {
    out[j] = second(ghost(v, j - 2, rule), ghost(v, j - 1, rule), v[j], ghost(v, j + 1, rule),
                    ghost(v, j + 2, rule), step_);
  }
  return out;
}

double MeridianGrid::interpolate(std::span<const double> v, double t, Reflection rule) const {
  const int left = static_cast<int>(std::floor(t / step_ - 0.5));
  double sum = 0.0;
  for (int a = left - 2; a <= left + 3; ++a) {
    double basis = 1.0;
    for (int b = left - 2; b <= left + 3; ++b) {
      if (b != a) basis *= (t - node(b)) / (node(a) - node(b));
    }
    sum += basis * ghost(v, a, rule);
  }
  return sum;
}

std::vector<double> MeridianGrid::base_weights(int n) const {
  std::vector<double> w(size_);
  if ((n - 1) % 2 == 0) {
    for (auto& x : w) x = step_;
    return w;
  }
  const auto fejer = fejer_weights(size_);
  for (int j = 0; j < size_; ++j) w[j] = fejer[j] / std::sin(node(j));
  return w;
}

SphereGrid::SphereGrid(int n_theta, int n_phi)
    : n_theta_(n_theta), n_phi_(n_phi), h_theta_(M_PI / n_theta), h_phi_(2.0 * M_PI / n_phi) {
  if (n_theta < 4 || n_phi < 4 || n_phi % 2 != 0) {
    throw std::invalid_argument("sphere grid needs N_theta >= 4 and even N_phi >= 4");
  }
}

double SphereGrid::at(std::span<const double> v, int j, int k, double parity) const {
  k = ((k % n_phi_) + n_phi_) % n_phi_;
  if (j < 0) return parity * v[index(-1 - j, (k + n_phi_ / 2) % n_phi_)];
  if (j >= n_theta_) return parity * v[index(2 * n_theta_ - 1 - j, (k + n_phi_ / 2) % n_phi_)];
  return v[index(j, k)];
}

std::vector<double> SphereGrid::d_theta(std::span<const double> v, double parity) const {
  std::vector<double> out(size());
  for (int j = 0; j < n_theta_; ++j)
    for (int k = 0; k < n_phi_; ++k) {
      out[index(j, k)] = first(at(v, j - 2, k, parity), at(v, j - 1, k, parity),
                               at(v, j + 1, k, parity), at(v, j + 2, k, parity), h_theta_);
    }
  return out;
}

std::vector<double> SphereGrid::d_theta2(std::span<const double> v, double parity) const {
  std::vector<double> out(size());
  for (int j = 0; j < n_theta_; ++j)
    for (int k = 0; k < n_phi_; ++k) {
      out[index(j, k)] = second(at(v, j - 2, k, parity), at(v, j - 1, k, parity), v[index(j, k)],
                                at(v, j + 1, k, parity), at(v, j + 2, k, parity), h_theta_);
    }
  return out;
}

std::vector<double> SphereGrid::d_phi(std::span<const double> v) const {
  std::vector<double> out(size());
  for (int j = 0; j < n_theta_; ++j)
    for (int k = 0; k < n_phi_; ++k) {
      out[index(j, k)] = first(at(v, j, k - 2, 1.0), at(v, j, k - 1, 1.0), at(v, j, k + 1, 1.0),
                               at(v, j, k + 2, 1.0), h_phi_);
    }
  return out;
}

std::vector<double> SphereGrid::d_phi2(std::span<const double> v) const {
  std::vector<double> out(size());
  for (int j = 0; j < n_theta_; ++j)
    for (int k = 0; k < n_phi_; ++k) {
      out[index(j, k)] = second(at(v, j, k - 2, 1.0), at(v, j, k - 1, 1.0), v[index(j, k)],
                                at(v, j, k + 1, 1.0), at(v, j, k + 2, 1.0), h_phi_);
    }
  return out;
}

std::vector<double> SphereGrid::base_weights() const {
  const auto fejer = fejer_weights(n_theta_);
  std::vector<double> w(size());
  for (int j = 0; j < n_theta_; ++j)
    for (int k = 0; k < n_phi_; ++k) w[index(j, k)] = fejer[j] / std::sin(theta(j)) * h_phi_;
  return w;
}

}  // namespace warpgeo
