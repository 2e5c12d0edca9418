#pragma once

#include <cstddef>
#include <span>

namespace safa {

// One-sided upper confidence limit for a binomial rate.
double clopper_pearson_upper(std::size_t successes, std::size_t trials, double confidence);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);

}  // namespace safa
