#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "tao/poisson.hpp"

using namespace tao;

TEST_SUITE("poisson") {
  TEST_CASE("pmf small values") {
    CHECK(poisson_pmf(0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(poisson_pmf(2, 1.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(poisson_pmf(0, 1.0) == doctest::Approx(0.367879).epsilon(1e-6));
    CHECK(poisson_pmf(2, 1.0) == doctest::Approx(0.183940).epsilon(1e-5));
  }

  TEST_CASE("degenerate mean") {
    CHECK(poisson_pmf(0, 0.0) == 1.0);
    CHECK(poisson_pmf(3, 0.0) == 0.0);
    for (int k : {0, 1, 5, 100}) CHECK(poisson_cdf(k, 0.0) == 1.0);
    CHECK(poisson_quantile(0.5, 0.0) == 0);
    CHECK(poisson_quantile(0.999, 0.0) == 0);
  }

  TEST_CASE("cdf values") {
    CHECK(poisson_cdf(2, 1.0) == doctest::Approx(std::exp(-1.0) * 2.5).epsilon(1e-14));
    CHECK(poisson_cdf(2, 1.0) == doctest::Approx(0.919699).epsilon(1e-6));
    for (double m : {0.5, 3.0, 10.0, 50.0, 400.0}) {
      const auto k = static_cast<std::int64_t>(std::ceil(m + 20.0 * std::sqrt(m)));
      CHECK(std::abs(poisson_cdf(k, m) - 1.0) < 1e-12);
    }
  }

  TEST_CASE("quantile values") {
    CHECK(poisson_quantile(0.95, 3.0) == 6);
    CHECK(poisson_cdf(5, 3.0) == doctest::Approx(0.9161).epsilon(1e-3));
    CHECK(poisson_cdf(6, 3.0) == doctest::Approx(0.9665).epsilon(1e-3));
    CHECK(poisson_quantile(0.5, 10.0) == 10);
    CHECK(poisson_quantile(0.95, 100.0) == 117);
  }

  TEST_CASE("large mean stays finite") {
    const double p = poisson_pmf(1000, 1000.0);
    CHECK(std::isfinite(p));
    CHECK(p == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * 1000.0)).epsilon(1e-3));
    CHECK(poisson_cdf(1000, 1000.0) == doctest::Approx(0.5084).epsilon(1e-3));
    const auto q = poisson_quantile(0.5, 800.0);
    CHECK(poisson_cdf(q, 800.0) >= 0.5);
    CHECK(poisson_cdf(q - 1, 800.0) < 0.5);
  }

  TEST_CASE("random cases against summation") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> kd(0, 200);
    std::uniform_real_distribution<double> md(0.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
      const int k = kd(rng);
      const double m = md(rng);
      CHECK(std::abs(poisson_pmf(k, m) - static_cast<double>(oracle::pmf(k, m))) < 1e-10);
      CHECK(std::abs(poisson_cdf(k, m) - static_cast<double>(oracle::cdf(k, m))) < 1e-10);
    }
  }

  TEST_CASE("monotone in k and mean") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> kd(0, 199);
    std::uniform_real_distribution<double> md(0.0, 50.0);
    for (int i = 0; i < 500; ++i) {
      const int k = kd(rng);
      const double m = md(rng);
      const double c = poisson_cdf(k, m);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      CHECK(poisson_cdf(k + 1, m) >= c);
      CHECK(poisson_cdf(k, m + 0.25) <= c);
    }
  }

  TEST_CASE("quantile adjointness") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> wd(0.001, 0.999);
    std::uniform_real_distribution<double> md(0.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
      const double w = wd(rng);
      const double m = md(rng);
      const auto q = poisson_quantile(w, m);
      CHECK(poisson_cdf(q, m) >= w);
      if (q > 0) CHECK(poisson_cdf(q - 1, m) < w);
    }
  }

  TEST_CASE("truncation point") {
    CHECK(poisson_truncation(0.0) == 20);
    CHECK(poisson_truncation(100.0) == 320);
  }

  TEST_CASE("argument errors") {
    CHECK_THROWS_AS(poisson_pmf(-1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_pmf(0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_cdf(-1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_quantile(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_quantile(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_quantile(0.5, -2.0), std::invalid_argument);
  }
}
