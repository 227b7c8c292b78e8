#include "platsim/model.hpp"

#include <cmath>

namespace platsim {

std::string to_string(RandomizationType v) {
    return v == RandomizationType::simple ? "simple" : "modified_block";
}

std::string to_string(AllocationKind v) {
    switch (v) {
        case AllocationKind::balanced: return "balanced";
        case AllocationKind::k_alloc: return "k_alloc";
        case AllocationKind::sqrt_k: return "sqrt_k";
        case AllocationKind::sqrt_k_capped: return "sqrt_k_capped";
    }
    return "?";
}

std::string to_string(CovariateSet v) {
    return v == CovariateSet::baseline_only ? "baseline_only" : "baseline_plus_period";
}

std::string to_string(TrialMode v) {
    return v == TrialMode::platform ? "platform" : "two_arm_series";
}

std::string to_string(TrendInterpretation v) {
    return v == TrendInterpretation::variance ? "variance" : "sd";
}

std::string to_string(Decision v) {
    switch (v) {
        case Decision::success: return "success";
        case Decision::failure: return "failure";
        case Decision::stopped_futility: return "stopped_futility";
    }
    return "?";
}

AllocationKind allocation_kind_from_string(const std::string& s) {
    if (s == "balanced") return AllocationKind::balanced;
    if (s == "k_alloc") return AllocationKind::k_alloc;
    if (s == "sqrt_k") return AllocationKind::sqrt_k;
    if (s == "sqrt_k_capped") return AllocationKind::sqrt_k_capped;
    throw ConfigError("unknown allocation kind '" + s + "'");
}

void ScenarioConfig::validate() const {
    if (!(allocation.cap >= 0.0 && allocation.cap < 1.0))
        throw ConfigError("allocation.cap must lie in [0, 1)");
    if (interim_fraction && !(*interim_fraction > 0.0 && *interim_fraction < 1.0))
        throw ConfigError("interim_fraction must lie in (0, 1)");
    if (futility_boundary && !interim_fraction)
        throw ConfigError("futility_boundary requires interim_fraction");
    if (futility_boundary && !(*futility_boundary > 0.0 && *futility_boundary <= 1.0))
        throw ConfigError("futility_boundary must lie in (0, 1]");
    if (target_n_per_arm < 1) throw ConfigError("target_n_per_arm must be >= 1");
    if (initial_arms < 1) throw ConfigError("initial_arms must be >= 1");
    if (max_concurrent_arms < initial_arms)
        throw ConfigError("max_concurrent_arms must be >= initial_arms");
    if (!(entry_probability_per_month >= 0.0 && entry_probability_per_month <= 1.0))
        throw ConfigError("entry_probability_per_month must lie in [0, 1]");
    if (entry_horizon_months < 1) throw ConfigError("entry_horizon_months must be >= 1");
    if (!(min_expected_accrual_fraction >= 0.0 && min_expected_accrual_fraction <= 1.0))
        throw ConfigError("min_expected_accrual_fraction must lie in [0, 1]");
    effect_distribution.validate();
    if (time_trend && !(time_trend->step_fraction >= 0.0))
        throw ConfigError("time_trend.step_fraction must be >= 0");
    if (recruitment_law.empty()) throw ConfigError("recruitment_law must not be empty");
    double sum = 0.0;
    double mean = 0.0;
    for (const auto& [count, prob] : recruitment_law) {
        if (count < 0) throw ConfigError("recruitment_law: arrival counts must be >= 0");
        if (!(prob >= 0.0 && prob <= 1.0))
            throw ConfigError("recruitment_law: probabilities must lie in [0, 1]");
        sum += prob;
        mean += count * prob;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw ConfigError("recruitment_law: probabilities must sum to 1");
    if (!(mean > 0.0)) throw ConfigError("recruitment_law: mean arrivals must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
}

}  // namespace platsim
