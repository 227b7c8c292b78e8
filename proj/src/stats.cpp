#include "platsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace platsim {

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile_sorted: p must lie in [0, 1]");
    if (sorted.size() == 1) return sorted.front();
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

SummaryStats summarize(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty sample");
    std::sort(values.begin(), values.end());
    SummaryStats s;
    s.n = values.size();
    s.q25 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.50);
    s.q75 = quantile_sorted(values, 0.75);
    return s;
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("mean_of: empty sample");
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

double sd_of(const std::vector<double>& values) {
    if (values.size() < 2) throw std::invalid_argument("sd_of: need at least two values");
    const double m = mean_of(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

double mc_error(double rate, std::size_t n) {
    if (n == 0) throw std::invalid_argument("mc_error: n must be positive");
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

}  // namespace platsim
