#pragma once

#include <cstddef>
#include <vector>

namespace platsim {

/// Median and interquartile range of a sample.
struct SummaryStats {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    std::size_t n = 0;
};

/// Linear-interpolation ("type 7") quantile of an ascending-sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Summarize a sample (copied and sorted internally). Throws on empty input.
SummaryStats summarize(std::vector<double> values);

double mean_of(const std::vector<double>& values);
double sd_of(const std::vector<double>& values);  // sample SD (n-1 denominator)

/// Binomial Monte Carlo standard error sqrt(p(1-p)/n).
double mc_error(double rate, std::size_t n);

}  // namespace platsim
