#include "engset/statistics.hpp"

#include <array>
#include <cmath>

#include "engset/error.hpp"

namespace engset {
namespace {

constexpr std::array<double, 60> kT975 = {
    12.706204736174705, 4.302652729749464, 3.1824463052837095, 2.7764451051977943,
    2.5705818356363155, 2.44691185114497, 2.3646242515927853, 2.3060041352041667,
    2.2621571627982053, 2.228138851986275, 2.2009851600916397, 2.178812829667229,
    2.1603686564627926, 2.144786687917804, 2.1314495455597755, 2.1199052992212546,
    2.109815577833317, 2.1009220402410387, 2.0930240544083096, 2.085963447265865,
    2.0796138447276804, 2.0738730679040263, 2.0686576104190486, 2.063898561628026,
    2.0595385527532977, 2.055529438642873, 2.0518305164802855, 2.048407141795245,
    2.0452296421327043, 2.042272456301238, 2.0395134463964086, 2.036933343460102,
    2.034515297449339, 2.032244509317719, 2.0301079282503434, 2.028094000980451,
    2.0261924630291097, 2.02439416391197, 2.0226909200367613, 2.0210753903062733,
    2.0195409704413763, 2.018081702818445, 2.0166921992278244, 2.015367574443764,
    2.0141033888808466, 2.012895598919429, 2.011740513729766, 2.0106347576242323,
    2.0095752371292397, 2.008559112100761, 2.007583770315836, 2.0066468050616884,
    2.005745995317869, 2.004879288188057, 2.004044783289146, 2.0032407188478722,
    2.0024654592910074, 2.001717484145236, 2.000995378088268, 2.0002978220142604,
};

constexpr double kNormal975 = 1.959963984540054;

}  // namespace

double student_t_975(int degrees_of_freedom) {
  if (degrees_of_freedom < 1) throw DomainError("degrees of freedom must be >= 1");
  if (degrees_of_freedom <= static_cast<int>(kT975.size())) return kT975[degrees_of_freedom - 1];
  return kNormal975;
}

ConfidenceInterval confidence_interval(std::span<const double> samples, double level) {
  if (samples.size() < 2) throw DomainError("a confidence interval needs at least 2 samples");
  if (level != 0.95) throw DomainError("only the 95% confidence level is supported");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double t = student_t_975(static_cast<int>(samples.size()) - 1);
  return {mean, t * sd / std::sqrt(n)};
}

}  // namespace engset
