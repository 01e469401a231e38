#include <doctest.h>

#include <random>
#include <vector>

#include "warpgeo/symfunc.hpp"

using namespace warpgeo;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Brute force over all k-subsets.
double sigma_enumerate(const Eigen::VectorXd& kappa, int k) {
  const int n = static_cast<int>(kappa.size());
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) prod *= kappa(i);
    total += prod;
  }
  return total;
}

}  // namespace

TEST_CASE("sigma_k small cases") {
  CHECK(sigma(vec({1, 1, 1}), 2) == doctest::Approx(3.0));
  CHECK(sigma(vec({1, 2, 3}), 2) == doctest::Approx(11.0));
  CHECK(sigma(vec({4, -2, 7}), 0) == 1.0);
  CHECK_THROWS_AS(sigma(vec({1, 2}), 3), std::out_of_range);
  CHECK_THROWS_AS(sigma(vec({1, 2}), -1), std::out_of_range);
}

TEST_CASE("sigma_k recurrence matches subset enumeration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> dim(1, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim(rng);
    Eigen::VectorXd kappa(n);
    for (int i = 0; i < n; ++i) kappa(i) = u(rng);
    for (int k = 0; k <= n; ++k) {
      const double ref = sigma_enumerate(kappa, k);
      CHECK(std::abs(sigma(kappa, k) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("truncated sigma") {
  const auto kappa = vec({1, 2, 3});
  CHECK(sigma_truncated(kappa, 2, {2}) == doctest::Approx(2.0));
  CHECK(sigma_truncated(kappa, 0, {0, 1}) == 1.0);
  CHECK(sigma_truncated(kappa, 1, {0, 1}) == doctest::Approx(3.0));
  CHECK(sigma_truncated(kappa, -1, {0, 1}) == 0.0);
  CHECK_THROWS_AS(sigma_truncated(kappa, 1, {1, 1}), std::invalid_argument);
}

TEST_CASE("newton derivative") {
  const auto kappa = vec({1, 2, 3});
  CHECK((newton_derivative(kappa, 1) - vec({1, 1, 1})).norm() < 1e-14);
  CHECK((newton_derivative(kappa, 2) - vec({5, 4, 3})).norm() < 1e-14);
  CHECK((newton_derivative(kappa, 3) - vec({6, 3, 2})).norm() < 1e-14);
}

TEST_CASE("newton derivative matches central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double d = 1e-4;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd kappa(5);
    for (int i = 0; i < 5; ++i) kappa(i) = u(rng);
    for (int k = 1; k <= 5; ++k) {
      const auto grad = newton_derivative(kappa, k);
      for (int i = 0; i < 5; ++i) {
        Eigen::VectorXd p = kappa, m = kappa;
        p(i) += d;
        m(i) -= d;
        CHECK(std::abs((sigma(p, k) - sigma(m, k)) / (2 * d) - grad(i)) < 1e-7);
      }
    }
  }
}

TEST_CASE("second derivative matches differences of the matrix sigma") {
  // sigma_k(h) for a general symmetric-or-not matrix is the sum of principal k-minors.
  auto sigma_matrix = [](const Eigen::MatrixXd& h, int k) {
    const int n = static_cast<int>(h.rows());
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (__builtin_popcount(mask) != k) continue;
      std::vector<int> idx;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) idx.push_back(i);
      Eigen::MatrixXd sub(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sub(a, b) = h(idx[a], idx[b]);
      total += sub.determinant();
    }
    return total;
  };
  const auto kappa = vec({0.7, -1.3, 2.1, 0.4});
  const Eigen::MatrixXd h0 = kappa.asDiagonal();
  const double d = 1e-3;
  for (int k = 2; k <= 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int p = 0; p < 4; ++p)
          for (int q = 0; q < 4; ++q) {
            auto at = [&](double a, double b) {
              Eigen::MatrixXd h = h0;
              h(i, j) += a;
              h(p, q) += b;
              return sigma_matrix(h, k);
            };
            const double fd = (at(d, d) - at(d, -d) - at(-d, d) + at(-d, -d)) / (4 * d * d);
            CHECK(std::abs(fd - sigma_second_derivative(kappa, k, i, j, p, q)) < 1e-6);
          }
}

TEST_CASE("mean curvatures and Maclaurin") {
  auto r = hk_and_maclaurin(vec({1, 2, 3}), 1);
  CHECK(r.hk == doctest::Approx(2.0));
  r = hk_and_maclaurin(vec({1, 2, 3}), 2);
  CHECK(r.hk == doctest::Approx(11.0 / 3.0));
  CHECK(r.maclaurin_ok);
  CHECK(std::sqrt(r.hk) == doctest::Approx(1.9149).epsilon(1e-4));
  r = hk_and_maclaurin(vec({1, 1, 1}), 3);
  CHECK(r.hk == doctest::Approx(1.0));
  CHECK(r.maclaurin_ok);
  const auto umb = vec({0.8, 0.8, 0.8, 0.8});
  for (int k = 1; k <= 4; ++k) {
    CHECK(std::pow(normalized_mean_curvature(umb, k), 1.0 / k) == doctest::Approx(0.8));
  }
}

TEST_CASE("Gamma_k cone") {
  CHECK(gamma_k_member(vec({1, 2, 3}), 3));
  CHECK_FALSE(gamma_k_member(vec({-1, -1, -1}), 1));
  CHECK(gamma_k_member(vec({3, 3, -1}), 2));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd kappa(5);
    for (int i = 0; i < 5; ++i) kappa(i) = u(rng);
    for (int k = 2; k <= 5; ++k) {
      if (gamma_k_member(kappa, k)) {
        for (int j = 1; j < k; ++j) CHECK(gamma_k_member(kappa, j));
      }
    }
  }
}

TEST_CASE("Newton inequality term") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> u;
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd kappa(4);
    for (int i = 0; i < 4; ++i) kappa(i) = u(rng);
    double pairs = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) pairs += (kappa(i) - kappa(j)) * (kappa(i) - kappa(j));
    CHECK(newton_inequality_term(kappa) >= -1e-12);
    CHECK(newton_inequality_term(kappa) == doctest::Approx(pairs));
  }
  CHECK(std::abs(newton_inequality_term(vec({2, 2, 2}))) < 1e-13);
}

TEST_CASE("determinant expansion") {
  const double t1[] = {1.0};
  CHECK(sigma_expansion_check(Eigen::MatrixXd::Zero(3, 3), t1) == 0.0);
  CHECK(sigma_expansion_check(Eigen::MatrixXd::Identity(3, 3), t1) < 1e-13);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) a(i, j) = u(rng);
  const Eigen::MatrixXd h = a + a.transpose();
  std::vector<double> ts(20);
  for (auto& t : ts) t = u(rng);
  CHECK(sigma_expansion_check(h, ts) <= 1e-9);
  Eigen::MatrixXd bad = h;
  bad(0, 1) += 1.0;
  CHECK_THROWS_AS(sigma_expansion_check(bad, ts), std::invalid_argument);
}

TEST_CASE("truncation identity") {
  CHECK(truncation_identity_check(vec({1, 2, 3}), 2, 0, 1) < 1e-15);
  CHECK(truncation_identity_check(vec({1, 2, 3}), 1, 0, 2) < 1e-15);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd kappa(6);
    for (int i = 0; i < 6; ++i) kappa(i) = u(rng);
    for (int k = 1; k <= 6; ++k)
      for (int j = 0; j < 6; ++j)
        for (int p = 0; p < 6; ++p)
          if (j != p) worst = std::max(worst, truncation_identity_check(kappa, k, j, p));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("Newton tensor divergence, algebraic form") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> u;
  SUBCASE("flat Codazzi data: fully symmetric gradient") {
    const int n = 4;
    Tensor3 g(n);
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        for (int c = b; c < n; ++c) {
          const double v = u(rng);
          g(a, b, c) = g(a, c, b) = g(b, a, c) = g(b, c, a) = g(c, a, b) = g(c, b, a) = v;
        }
    Eigen::VectorXd kappa(n);
    for (int i = 0; i < n; ++i) kappa(i) = u(rng);
    const auto s = CodazziSample::from_gradient(kappa, g);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int i = 0; i < n; ++i) CHECK(s.curvature_slot(p, q, i) == 0.0);
    for (int k = 2; k <= n; ++k)
      for (int j = 0; j < n; ++j) CHECK(newton_divergence_algebraic(s, k, j) < 1e-12);
  }
  SUBCASE("random samples") {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 3 + trial % 4;
      Tensor3 g(n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) g(a, b, c) = u(rng);
      Eigen::VectorXd kappa(n);
      for (int i = 0; i < n; ++i) kappa(i) = u(rng);
      const auto s = CodazziSample::from_gradient(kappa, g);
      for (int k = 2; k <= n; ++k)
        for (int j = 0; j < n; ++j) worst = std::max(worst, newton_divergence_algebraic(s, k, j));
    }
    CHECK(worst <= 1e-10);
  }
  SUBCASE("k out of range") {
    const auto s = CodazziSample::from_gradient(vec({1, 2, 3}), Tensor3(3));
    CHECK_THROWS_AS(newton_divergence_algebraic(s, 1, 0), std::out_of_range);
    CHECK_THROWS_AS(newton_divergence_algebraic(s, 4, 0), std::out_of_range);
  }
}

TEST_CASE("binomial") {
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(4, 0) == 1.0);
  CHECK(binomial(3, 4) == 0.0);
}
