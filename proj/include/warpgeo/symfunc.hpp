#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <span>
#include <vector>

namespace warpgeo {

/// Principal curvatures (kappa_1, ..., kappa_n); no ordering is assumed.
using PrincipalCurvatures = Eigen::VectorXd;

/// Elementary symmetric function sigma_k by the one-pass prefix recurrence.
/// sigma_0 = 1. Throws std::out_of_range unless 0 <= k <= n.
double sigma(const PrincipalCurvatures& kappa, int k);

/// sigma_0, ..., sigma_n.
Eigen::VectorXd sigma_all(const PrincipalCurvatures& kappa);

/// sigma_k with the listed entries set to zero. Total in k: sigma_{-1;.} = 0 and
/// sigma_k = 0 for k beyond the number of surviving entries.
double sigma_truncated(const PrincipalCurvatures& kappa, int k, std::span<const int> omit);
double sigma_truncated(const PrincipalCurvatures& kappa, int k, std::initializer_list<int> omit);

/// Diagonal of d sigma_k / d h at h = diag(kappa): component i is sigma_{k-1;i}.
Eigen::VectorXd newton_derivative(const PrincipalCurvatures& kappa, int k);

/// d^2 sigma_k / (d h_ij d h_pq) at h = diag(kappa), treating all n^2 entries as independent.
double sigma_second_derivative(const PrincipalCurvatures& kappa, int k, int i, int j, int p, int q);

/// H_k = sigma_k / C(n, k).
double normalized_mean_curvature(const PrincipalCurvatures& kappa, int k);

struct MaclaurinResult {
  double hk = 0.0;
  bool maclaurin_ok = true;
  /// H_{k-1}^{1/(k-1)} - H_k^{1/k}; zero for k = 1.
  double gap = 0.0;
};

MaclaurinResult hk_and_maclaurin(const PrincipalCurvatures& kappa, int k);

/// sigma_1, ..., sigma_k all positive.
bool gamma_k_member(const PrincipalCurvatures& kappa, int k);

/// (n-1) sigma_1^2 - 2 n sigma_2 = sum_{i<j} (kappa_i - kappa_j)^2, nonnegative.
double newton_inequality_term(const PrincipalCurvatures& kappa);

/// max_t | det(I + t h) - sum_k t^k sigma_k(eig h) |.
double sigma_expansion_check(const Eigen::MatrixXd& h, std::span<const double> t_samples);

/// | sigma_{k-2;jp} kappa_j - sigma_{k-1;p} + sigma_{k-1;jp} |.
double truncation_identity_check(const PrincipalCurvatures& kappa, int k, int j, int p);

/// Dense n x n x n array.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

  int n() const { return n_; }
  double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }
  double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }

 private:
  std::size_t index(int a, int b, int c) const {
    return (static_cast<std::size_t>(a) * n_ + b) * n_ + c;
  }
  int n_ = 0;
  std::vector<double> data_;
};

/// Pointwise Codazzi data at a point where h = diag(kappa):
///   grad_h(i, p, q) = nabla_i h_pq (symmetric in p, q),
///   curvature_slot(p, q, i) = nabla_i h_pq - nabla_q h_pi.
struct CodazziSample {
  PrincipalCurvatures kappa;
  Tensor3 grad_h;
  Tensor3 curvature_slot;

  /// Symmetrizes grad_h in its last two indices and derives the curvature slot.
  static CodazziSample from_gradient(PrincipalCurvatures kappa, Tensor3 grad_h);
};

/// | sum_i nabla_i (d sigma_k / d h_ij) + sum_{p != j} Rbar_{nu p j p} sigma_{k-2;jp} |
/// for 2 <= k <= n, with the left side assembled from exact second derivatives.
double newton_divergence_algebraic(const CodazziSample& sample, int k, int j);

double binomial(int n, int k);

}  // namespace warpgeo
