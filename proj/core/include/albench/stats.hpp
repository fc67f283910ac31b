#pragma once

#include <cstddef>
#include <vector>

namespace albench {

double normal_cdf(double z);

// Upper tail P(X >= x) for a chi-squared variable with `df` degrees of
// freedom (regularized incomplete gamma).
double chi_squared_sf(double x, double df);

// Ranks with average ranks for ties (1 = smallest value).
std::vector<double> rank_with_ties(const std::vector<double>& values);

// Sum of (t^3 - t) over tie groups of a ranked row.
double tie_correction_term(const std::vector<double>& ranks);

}  // namespace albench
