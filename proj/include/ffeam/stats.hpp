#pragma once

#include <span>
#include <vector>

namespace ffeam {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// CDF of Student's t with `df` (real, > 0) degrees of freedom.
double student_t_cdf(double t, double df);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
  // Both samples have zero variance; p is 1 for equal means, 0 otherwise.
  bool degenerate = false;
};

WelchResult welch_ttest(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> v);
// Unbiased sample variance.
double sample_variance(std::span<const double> v);
double median(std::vector<double> v);
double pearson_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace ffeam
