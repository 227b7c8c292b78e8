#include "platsim/outcome.hpp"

#include <cmath>
#include <stdexcept>

namespace platsim {

OutcomeCalibration OutcomeCalibration::standard() {
    OutcomeCalibration c;
    double acc = 0.0;
    int n = 0;
    for (std::size_t i = 1; i < c.delta_map.size(); ++i) {
        acc += c.delta_map[i] / EffectDistribution::kGrid[i];
        ++n;
    }
    c.sd_delta = acc / n;
    c.sigma_week6 = c.sd_delta / std::sqrt(1.25 - c.rho);
    c.sigma_baseline = 0.5 * c.sigma_week6;
    return c;
}

double trend_offset(long period_id, const std::optional<TimeTrend>& trend,
                    const OutcomeCalibration& calib) {
    if (!trend) return 0.0;
    const double scale = trend->interpretation == TrendInterpretation::variance
                             ? calib.sigma_week6 * calib.sigma_week6
                             : calib.sigma_week6;
    return static_cast<double>(period_id) * trend->step_fraction * scale;
}

std::pair<double, double> generate_outcome(RngStream& rng, bool is_control, int effect_index,
                                           long period_id, const OutcomeCalibration& calib,
                                           const std::optional<TimeTrend>& trend) {
    double delta = 0.0;
    if (!is_control) {
        if (effect_index < 0 || effect_index >= static_cast<int>(calib.delta_map.size()))
            throw std::invalid_argument("generate_outcome: unknown effect size");
        delta = calib.delta_map[static_cast<std::size_t>(effect_index)];
    }
    const double mu_week6 = calib.mu_week6_control - delta + trend_offset(period_id, trend, calib);
    return rng.normal_pair(calib.mu_baseline, mu_week6, calib.sigma_baseline, calib.sigma_week6,
                           calib.rho);
}

double standardized_effect(double delta, double sd_delta) {
    if (!(sd_delta > 0.0)) throw std::invalid_argument("standardized_effect: sd_delta must be positive");
    return delta / sd_delta;
}

}  // namespace platsim
