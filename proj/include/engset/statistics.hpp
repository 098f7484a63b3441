#pragma once

#include <span>

namespace engset {

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Two-sided Student-t interval for the mean of independent samples, n-1
/// degrees of freedom. Only level 0.95 is tabulated. Needs >= 2 samples.
ConfidenceInterval confidence_interval(std::span<const double> samples, double level = 0.95);

/// Upper 0.975 quantile of Student's t; exact table for df 1..60, normal
/// quantile beyond.
double student_t_975(int degrees_of_freedom);

}  // namespace engset
