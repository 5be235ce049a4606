#include <doctest.h>

#include <algorithm>
#include <vector>

#include "blockgibbs/linalg.hpp"
#include "blockgibbs/random.hpp"

using namespace blockgibbs;

TEST_CASE("equal seeds give bitwise-identical streams") {
  RngStream a(123456), b(123456);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(123456), d(123456);
  for (int i = 0; i < 200; ++i) {
    CHECK(draw_normal(c) == draw_normal(d));
    CHECK(draw_gamma(0.7, 2.0, c) == draw_gamma(0.7, 2.0, d));
    CHECK(draw_inverse_gaussian(1.5, 0.8, c) == draw_inverse_gaussian(1.5, 0.8, d));
    CHECK(draw_student_t2(c) == draw_student_t2(d));
  }
}

TEST_CASE("derived seeds differ across labels") {
  CHECK(derive_seed(7, 0, 0) != derive_seed(7, 0, 1));
  CHECK(derive_seed(7, 1, 0) != derive_seed(7, 0, 1));
  CHECK(derive_seed(7, 2, 3, 4) == derive_seed(7, 2, 3, 4));
}

TEST_CASE("inverse gamma") {
  SUBCASE("parameter validation") {
    RngStream rng(1);
    CHECK_THROWS_AS(draw_inverse_gamma(0.0, 1.0, rng), InvalidParameter);
    CHECK_THROWS_AS(draw_inverse_gamma(1.0, -1.0, rng), InvalidParameter);
  }
  SUBCASE("shape 1 scale 1 median is 1/ln 2") {
    RngStream rng(2024);
    const int n = 1'000'000;
    std::vector<double> draws(n);
    for (auto& x : draws) x = draw_inverse_gamma(1.0, 1.0, rng);
    std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
    CHECK(draws[n / 2] == doctest::Approx(1.0 / std::log(2.0)).epsilon(0.01));
  }
  SUBCASE("shape 3 scale 2 mean is 1") {
    RngStream rng(77);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += draw_inverse_gamma(3.0, 2.0, rng);
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("KS test against analytic CDF, shape 2 scale 1") {
    // X ~ IG(2,1) has CDF (1 + 1/x) exp(-1/x).
    RngStream rng(31337);
    const int n = 100'000;
    std::vector<double> draws(n);
    for (auto& x : draws) x = draw_inverse_gamma(2.0, 1.0, rng);
    std::sort(draws.begin(), draws.end());
    double d_stat = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = (1.0 + 1.0 / draws[i]) * std::exp(-1.0 / draws[i]);
      d_stat = std::max(d_stat, std::abs(f - static_cast<double>(i) / n));
      d_stat = std::max(d_stat, std::abs(f - static_cast<double>(i + 1) / n));
    }
    // Kolmogorov critical value at significance 1e-3.
    const double critical = std::sqrt(-0.5 * std::log(0.0005)) / std::sqrt(n);
    CHECK(d_stat < critical);
  }
}

TEST_CASE("inverse gaussian") {
  SUBCASE("parameter validation") {
    RngStream rng(1);
    CHECK_THROWS_AS(draw_inverse_gaussian(-1.0, 1.0, rng), InvalidParameter);
    CHECK_THROWS_AS(draw_inverse_gaussian(1.0, 0.0, rng), InvalidParameter);
  }
  SUBCASE("mean 1 shape 1: empirical mean") {
    RngStream rng(4242);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += draw_inverse_gaussian(1.0, 1.0, rng);
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("mean 2 shape 1: empirical variance is mean^3/shape = 8") {
    RngStream rng(555);
    const int n = 1'000'000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = draw_inverse_gaussian(2.0, 1.0, rng);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / n;
    CHECK(sum2 / n - mean * mean == doctest::Approx(8.0).epsilon(0.025));
  }
  SUBCASE("always positive") {
    RngStream rng(9);
    for (int i = 0; i < 10'000; ++i) {
      const double x = draw_inverse_gaussian(0.01, 5.0, rng);
      CHECK(x > 0.0);
      CHECK(std::isfinite(x));
    }
  }
}

TEST_CASE("student t2") {
  SUBCASE("median zero") {
    RngStream rng(808);
    const int n = 1'000'000;
    std::vector<double> draws(n);
    for (auto& x : draws) x = draw_student_t2(rng);
    std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
    CHECK(std::abs(draws[n / 2]) < 0.01);
  }
  SUBCASE("P(|T| <= 1) matches the closed-form CDF") {
    // t2 CDF gives P(|T| <= 1) = 1/sqrt(3) ~ 0.5774.
    RngStream rng(313);
    const int n = 1'000'000;
    int inside = 0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(draw_student_t2(rng)) <= 1.0) ++inside;
    }
    CHECK(static_cast<double>(inside) / n ==
          doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(0.01));
  }
  SUBCASE("tail exponent is 2") {
    // P(|T| > x) = 1 - x/sqrt(2 + x^2) ~ x^{-2}; fit the exponent between
    // x = 10 and x = 30 on 10^7 draws.
    RngStream rng(2718);
    const int n = 10'000'000;
    long long above10 = 0, above30 = 0;
    for (int i = 0; i < n; ++i) {
      const double a = std::abs(draw_student_t2(rng));
      if (a > 10.0) ++above10;
      if (a > 30.0) ++above30;
    }
    const double exponent =
        std::log(static_cast<double>(above10) / static_cast<double>(above30)) /
        std::log(3.0);
    CHECK(exponent == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("mvn with precision factorization") {
  SUBCASE("identity precision: empirical covariance is I") {
    PrecisionSolver solver{Matrix::Identity(2, 2)};
    RngStream rng(12);
    const int n = 100'000;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (int i = 0; i < n; ++i) {
      Vector z = draw_mvn_mean_precision(Vector::Zero(2), 1.0, solver, rng);
      mean += z;
      cov += z * z.transpose();
    }
    mean /= n;
    cov = cov / n - mean * mean.transpose();
    CHECK((cov - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 0.05);
  }
  SUBCASE("diagonal precision diag(4,1): variances (0.25, 1)") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 4;
    a(1, 1) = 1;
    PrecisionSolver solver{a};
    RngStream rng(13);
    const int n = 100'000;
    double v0 = 0, v1 = 0;
    for (int i = 0; i < n; ++i) {
      Vector z = draw_mvn_mean_precision(Vector::Zero(2), 1.0, solver, rng);
      v0 += z(0) * z(0);
      v1 += z(1) * z(1);
    }
    CHECK(v0 / n == doctest::Approx(0.25).epsilon(0.08));
    CHECK(v1 / n == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("dense 2x2 with sigma2 = 2") {
    Matrix a(2, 2);
    a << 2, 1, 1, 2;
    PrecisionSolver solver{a};
    RngStream rng(14);
    const int n = 100'000;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (int i = 0; i < n; ++i) {
      Vector z = draw_mvn_mean_precision(Vector::Zero(2), 2.0, solver, rng);
      cov += z * z.transpose();
    }
    cov /= n;
    Eigen::Matrix2d expected;
    expected << 4.0 / 3, -2.0 / 3, -2.0 / 3, 4.0 / 3;
    CHECK((cov - expected).cwiseAbs().maxCoeff() < 0.05);
  }
}

TEST_CASE("gamma small shapes stay positive and finite") {
  RngStream rng(21);
  for (double shape : {0.05, 0.5, 1.0, 4.5, 30.0}) {
    for (int i = 0; i < 5000; ++i) {
      const double x = draw_gamma(shape, 1.3, rng);
      CHECK(x > 0.0);
      CHECK(std::isfinite(x));
    }
  }
}
