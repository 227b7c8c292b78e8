#pragma once

#include <array>
#include <optional>
#include <utility>

#include "platsim/model.hpp"
#include "platsim/rng.hpp"

namespace platsim {

/// MADRS calibration: baseline/week-6 means, baseline-week6 correlation, and the
/// published map from standardized effect size d to absolute week-6 reduction.
///
/// The change-score SD is anchored by the d -> points map: SD_delta is the mean
/// of delta/d over the nonzero grid. Week-6 and baseline SDs are then chosen so
/// that SD(week6 - baseline) equals SD_delta exactly while the week-6 residual
/// spread matches phase II MADRS data (baseline SD half the week-6 SD):
///   Var(delta) = sigma_w6^2 + sigma_bl^2 - 2*rho*sigma_w6*sigma_bl
///              = sigma_w6^2 * (1.25 - rho)  with sigma_bl = sigma_w6 / 2.
struct OutcomeCalibration {
    double mu_baseline = 32.0;
    double mu_week6_control = 20.0;
    double rho = 0.214;
    std::array<double, 4> delta_map{0.0, 2.25, 4.0, 5.7};  // keyed by effect grid index
    double sd_delta = 0.0;
    double sigma_week6 = 0.0;
    double sigma_baseline = 0.0;

    static OutcomeCalibration standard();
};

/// Additive week-6 offset of the step trend at a given period.
double trend_offset(long period_id, const std::optional<TimeTrend>& trend,
                    const OutcomeCalibration& calib);

/// One patient's (baseline, week6) pair. `effect_index` indexes the effect grid
/// and is ignored for controls.
std::pair<double, double> generate_outcome(RngStream& rng, bool is_control, int effect_index,
                                           long period_id, const OutcomeCalibration& calib,
                                           const std::optional<TimeTrend>& trend);

/// Standardized effect size per the change-score definition (delta / SD_delta).
double standardized_effect(double delta, double sd_delta);

}  // namespace platsim
