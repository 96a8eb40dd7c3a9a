#include <cmath>
#include <vector>

#include "doctest.h"
#include "ffeam/core.hpp"
#include "ffeam/stats.hpp"

using namespace ffeam;

// Reference values below were computed offline at 50 significant digits.

TEST_CASE("regularized incomplete beta against references") {
  CHECK(regularized_incomplete_beta(2, 3, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(0.5, 0.5, 0.1) ==
        doctest::Approx(0.20483276469913345165).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(10, 2, 0.9) == doctest::Approx(0.6973568802).epsilon(1e-10));
  CHECK(regularized_incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(regularized_incomplete_beta(3, 4, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(3, 4, 1.0) == 1.0);
  CHECK_THROWS_AS(regularized_incomplete_beta(0, 1, 0.5), NumericalError);
  CHECK_THROWS_AS(regularized_incomplete_beta(1, 1, 1.5), NumericalError);
}

TEST_CASE("Student t CDF against references") {
  CHECK(student_t_cdf(0.5, 3) == doctest::Approx(0.67427601757592450278).epsilon(1e-12));
  CHECK(student_t_cdf(2.0, 7.5) == doctest::Approx(0.95855150235091684365).epsilon(1e-12));
  CHECK(student_t_cdf(-1.3, 1.0) == doctest::Approx(0.20871440016015273135).epsilon(1e-12));
  CHECK(student_t_cdf(3.0, 30) == doctest::Approx(0.99730501796717402669).epsilon(1e-12));
  CHECK(student_t_cdf(0.0, 4) == 0.5);
}

TEST_CASE("Welch t-test on a 10-point fixture") {
  const std::vector<double> a{5.1, 4.9, 6.2, 5.8, 6.0, 5.5, 5.3, 6.1, 5.7, 5.4};
  const std::vector<double> b{4.1, 4.5, 4.8, 5.9, 4.2, 4.7, 5.0, 3.9, 4.4, 4.6};
  const auto r = welch_ttest(a, b);
  CHECK(r.t == doctest::Approx(4.403504869191842158).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(16.920502969027967345).epsilon(1e-12));
  CHECK(std::fabs(r.p_value - 0.00039227246813679295927) < 1e-10);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("Welch t-test with unequal sizes") {
  const std::vector<double> c{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> d{2.5, 3.1, 7.7, 9.9, 12.0};
  const auto r = welch_ttest(c, d);
  CHECK(r.t == doctest::Approx(-0.73548232456089650664).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(6.2017258197656027449).epsilon(1e-12));
  CHECK(std::fabs(r.p_value - 0.48891706737920692695) < 1e-10);
  CHECK(welch_ttest(c, c).p_value == 1.0);
}

TEST_CASE("Welch t-test degenerate and large-shift cases") {
  const std::vector<double> k1(5, 2.0), k2(5, 3.0);
  auto same = welch_ttest(k1, k1);
  CHECK(same.degenerate);
  CHECK(same.p_value == 1.0);
  auto diff = welch_ttest(k1, k2);
  CHECK(diff.degenerate);
  CHECK(diff.p_value == 0.0);
  CHECK_THROWS_AS(welch_ttest(std::vector<double>{1.0}, k1), NumericalError);

  // A 10 standard deviation shift at n = 1000 is overwhelmingly significant.
  std::vector<double> x(1000), y(1000);
  for (int i = 0; i < 1000; ++i) x[i] = std::sin(i * 1.37);
  const double sd = std::sqrt(sample_variance(x));
  for (int i = 0; i < 1000; ++i) y[i] = x[i] + 10.0 * sd;
  CHECK(welch_ttest(x, y).p_value < 1e-6);
}

TEST_CASE("descriptive helpers") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(std::isnan(median({})));
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == 2.5);
  CHECK(sample_variance(v) == doctest::Approx(5.0 / 3.0));
  CHECK(pearson_correlation(v, std::vector<double>{2, 4, 6, 8}) == doctest::Approx(1.0));
}
