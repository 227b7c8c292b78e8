#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "platsim/model.hpp"
#include "platsim/stats.hpp"

namespace platsim {

/// Pooled decision counts and rates for one effect size.
struct EffectRates {
    double d = 0.0;
    long n_comparisons = 0;
    long n_success = 0;
    long n_failure = 0;
    long n_futility = 0;
    double success_rate = 0.0;
    double failure_rate = 0.0;
    double futility_rate = 0.0;
    double se_success = 0.0;
    double se_failure = 0.0;
    double se_futility = 0.0;
};

/// Aggregated behavior of one design over replicates.
///
/// Decision rates are pooled over arm-comparisons stratified by true effect;
/// distributional metrics are summarized per replicate (platform totals) or per
/// comparison (per-arm counts and durations).
struct OperatingCharacteristics {
    long replicates = 0;       // usable (non-failed) replicates
    long total_comparisons = 0;
    std::array<EffectRates, 4> per_effect{};
    SummaryStats total_n{};
    SummaryStats control_n{};
    SummaryStats n_arms{};
    SummaryStats arms_per_1000{};  // per-replicate 1000 * n_arms / total_n
    SummaryStats platform_duration_weeks{};
    SummaryStats per_arm_n{};           // treatment patients, pooled over comparisons
    SummaryStats arm_duration_weeks{};  // pooled over comparisons
    std::optional<SummaryStats> controls_final;    // concurrent controls at final analysis
    std::optional<SummaryStats> controls_interim;  // concurrent controls at interim
};

/// Fold replicate results into operating characteristics. Failed replicates are
/// skipped; throws if none are usable. Permutation-invariant in the input order.
OperatingCharacteristics aggregate(const std::vector<ReplicateResult>& results);

/// Canonical JSON rendering (stable key order, round-trippable numbers).
std::string serialize_oc(const OperatingCharacteristics& oc);

}  // namespace platsim
