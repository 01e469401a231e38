#include "warpgeo/symfunc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace warpgeo {

namespace {

void require_k(const PrincipalCurvatures& kappa, int k, int lo) {
  if (k < lo || k > kappa.size()) {
    throw std::out_of_range("k = " + std::to_string(k) + " outside [" + std::to_string(lo) +
                            ", " + std::to_string(kappa.size()) + "]");
  }
}

double sigma_unchecked(const PrincipalCurvatures& kappa, int k) {
  if (k < 0) return 0.0;
  if (k == 0) return 1.0;
  if (k > kappa.size()) return 0.0;
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (Eigen::Index i = 0; i < kappa.size(); ++i) {
    const int top = std::min<int>(static_cast<int>(i) + 1, k);
    for (int j = top; j >= 1; --j) e[j] += kappa(i) * e[j - 1];
  }
  return e[k];
}

}  // namespace

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

double sigma(const PrincipalCurvatures& kappa, int k) {
  require_k(kappa, k, 0);
  return sigma_unchecked(kappa, k);
}

Eigen::VectorXd sigma_all(const PrincipalCurvatures& kappa) {
  const auto n = kappa.size();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
  e(0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j >= 1; --j) e(j) += kappa(i) * e(j - 1);
  }
  return e;
}

double sigma_truncated(const PrincipalCurvatures& kappa, int k, std::span<const int> omit) {
  PrincipalCurvatures reduced = kappa;
  for (std::size_t a = 0; a < omit.size(); ++a) {
    if (omit[a] < 0 || omit[a] >= kappa.size()) {
      throw std::out_of_range("omitted index " + std::to_string(omit[a]) + " out of range");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (omit[a] == omit[b]) throw std::invalid_argument("duplicate omitted index");
    }
    reduced(omit[a]) = 0.0;
  }
  return sigma_unchecked(reduced, k);
}

double sigma_truncated(const PrincipalCurvatures& kappa, int k, std::initializer_list<int> omit) {
  return sigma_truncated(kappa, k, std::span<const int>(omit.begin(), omit.size()));
}

Eigen::VectorXd newton_derivative(const PrincipalCurvatures& kappa, int k) {
  require_k(kappa, k, 1);
  Eigen::VectorXd out(kappa.size());
  for (int i = 0; i < kappa.size(); ++i) out(i) = sigma_truncated(kappa, k - 1, {i});
  return out;
}

double sigma_second_derivative(const PrincipalCurvatures& kappa, int k, int i, int j, int p, int q) {
  if (i == j && p == q && i != p) return sigma_truncated(kappa, k - 2, {i, p});
  if (i != j && p == j && q == i) return -sigma_truncated(kappa, k - 2, {i, j});
  return 0.0;
}

double normalized_mean_curvature(const PrincipalCurvatures& kappa, int k) {
  return sigma(kappa, k) / binomial(static_cast<int>(kappa.size()), k);
}

MaclaurinResult hk_and_maclaurin(const PrincipalCurvatures& kappa, int k) {
  require_k(kappa, k, 1);
  MaclaurinResult out;
  out.hk = normalized_mean_curvature(kappa, k);
  if (k == 1) return out;
  const double prev = normalized_mean_curvature(kappa, k - 1);
  // Signed roots keep the comparison defined outside Gamma_k; it is only meaningful inside.
  auto root = [](double x, int m) { return std::copysign(std::pow(std::abs(x), 1.0 / m), x); };
  out.gap = root(prev, k - 1) - root(out.hk, k);
  out.maclaurin_ok = out.gap >= -1e-12;
  return out;
}

bool gamma_k_member(const PrincipalCurvatures& kappa, int k) {
  require_k(kappa, k, 1);
  const Eigen::VectorXd e = sigma_all(kappa);
  for (int i = 1; i <= k; ++i) {
    if (!(e(i) > 0.0)) return false;
  }
  return true;
}

double newton_inequality_term(const PrincipalCurvatures& kappa) {
  const double n = static_cast<double>(kappa.size());
  const Eigen::VectorXd e = sigma_all(kappa);
  return (n - 1.0) * e(1) * e(1) - 2.0 * n * e(2);
}

double sigma_expansion_check(const Eigen::MatrixXd& h, std::span<const double> t_samples) {
  if (h.rows() != h.cols()) throw std::invalid_argument("matrix must be square");
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("matrix must be symmetric");
  }
  const auto n = h.rows();
  const Eigen::VectorXd e = sigma_all(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues());
  double worst = 0.0;
  for (double t : t_samples) {
    const double lhs = (Eigen::MatrixXd::Identity(n, n) + t * h).determinant();
    double rhs = 0.0;
    double tk = 1.0;
    for (Eigen::Index k = 0; k <= n; ++k, tk *= t) rhs += tk * e(k);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double truncation_identity_check(const PrincipalCurvatures& kappa, int k, int j, int p) {
  if (j == p) throw std::invalid_argument("truncation identity needs j != p");
  require_k(kappa, k, 1);
  return std::abs(sigma_truncated(kappa, k - 2, {j, p}) * kappa(j) -
                  sigma_truncated(kappa, k - 1, {p}) + sigma_truncated(kappa, k - 1, {j, p}));
}

CodazziSample CodazziSample::from_gradient(PrincipalCurvatures kappa, Tensor3 grad_h) {
  const int n = static_cast<int>(kappa.size());
  if (grad_h.n() != n) throw std::invalid_argument("gradient tensor has wrong dimension");
  CodazziSample s;
  s.kappa = std::move(kappa);
  s.grad_h = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) s.grad_h(i, p, q) = 0.5 * (grad_h(i, p, q) + grad_h(i, q, p));
  s.curvature_slot = Tensor3(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int i = 0; i < n; ++i) s.curvature_slot(p, q, i) = s.grad_h(i, p, q) - s.grad_h(q, p, i);
  return s;
}

double newton_divergence_algebraic(const CodazziSample& sample, int k, int j) {
  const auto& kappa = sample.kappa;
  const int n = static_cast<int>(kappa.size());
  require_k(kappa, k, 2);
  if (j < 0 || j >= n) throw std::out_of_range("index j out of range");

  double lhs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const double d2 = sigma_second_derivative(kappa, k, i, j, p, q);
        if (d2 != 0.0) lhs += d2 * sample.grad_h(i, p, q);
      }
  double rhs = 0.0;
  for (int p = 0; p < n; ++p) {
    if (p == j) continue;
    rhs -= sample.curvature_slot(p, j, p) * sigma_truncated(kappa, k - 2, {j, p});
  }
  return std::abs(lhs - rhs);
}

}  // namespace warpgeo
