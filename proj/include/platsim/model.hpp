#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "platsim/rng.hpp"

namespace platsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Degenerate model fit (zero outcome variance, rank-deficient core columns, ...).
struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RandomizationType { simple, modified_block };
enum class AllocationKind { balanced, k_alloc, sqrt_k, sqrt_k_capped };
enum class CovariateSet { baseline_only, baseline_plus_period };
enum class TrialMode { platform, two_arm_series };
enum class TrendInterpretation { variance, sd };
enum class Decision { success, failure, stopped_futility };

std::string to_string(RandomizationType v);
std::string to_string(AllocationKind v);
std::string to_string(CovariateSet v);
std::string to_string(TrialMode v);
std::string to_string(TrendInterpretation v);
std::string to_string(Decision v);

/// Inverse of to_string; throws ConfigError on an unknown name.
AllocationKind allocation_kind_from_string(const std::string& s);

struct AllocationPolicy {
    AllocationKind kind = AllocationKind::sqrt_k_capped;
    double cap = 0.35;  // used by sqrt_k_capped only
};

/// Categorical distribution over the standardized effect grid {0, 0.2, 0.35, 0.5}.
struct EffectDistribution {
    static constexpr std::array<double, 4> kGrid{0.0, 0.2, 0.35, 0.5};
    std::array<double, 4> theta{0.25, 0.25, 0.25, 0.25};

    static EffectDistribution equal() { return {}; }
    static EffectDistribution pessimistic() { return {{0.5, 0.3, 0.1, 0.1}}; }

    void validate() const {
        double sum = 0.0;
        for (double p : theta) {
            if (!(p >= 0.0 && p <= 1.0))
                throw ConfigError("effect_distribution: probabilities must lie in [0, 1]");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw ConfigError("effect_distribution: probabilities must sum to 1");
    }
};

/// Index into EffectDistribution::kGrid of a categorical draw.
inline int draw_effect(RngStream& rng, const EffectDistribution& dist) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        acc += dist.theta[static_cast<std::size_t>(i)];
        if (u < acc) return i;
    }
    return 3;
}

/// Step-function drift of the week-6 outcome, one step per time period.
struct TimeTrend {
    double step_fraction = 0.1;  // fraction of week-6 variance (or SD) per period
    TrendInterpretation interpretation = TrendInterpretation::variance;
};

/// Complete description of one simulated design (one grid point).
struct ScenarioConfig {
    std::string scenario_id = "s000";
    TrialMode mode = TrialMode::platform;
    RandomizationType randomization = RandomizationType::modified_block;
    AllocationPolicy allocation{};
    CovariateSet analysis_covariates = CovariateSet::baseline_only;
    std::optional<double> interim_fraction;    // analysis at ceil(fraction * target_n)
    std::optional<double> futility_boundary;   // stop if one-sided interim p > boundary
    int target_n_per_arm = 80;
    int initial_arms = 6;
    double entry_probability_per_month = 1.0;
    int max_concurrent_arms = 6;
    int entry_horizon_months = 60;
    double min_expected_accrual_fraction = 0.2;
    EffectDistribution effect_distribution{};
    std::optional<TimeTrend> time_trend;
    std::vector<std::pair<int, double>> recruitment_law{{6, 0.05}, {7, 0.90}, {8, 0.05}};
    double alpha = 0.05;
    int replicates = 10000;
    std::uint64_t master_seed = 1;

    int entry_horizon_weeks() const { return 4 * entry_horizon_months; }
    void validate() const;
};

/// Outcome of one treatment-vs-control comparison.
struct ComparisonResult {
    int arm_id = 0;
    int effect_index = 0;  // into EffectDistribution::kGrid
    double d = 0.0;
    Decision decision = Decision::failure;
    std::optional<double> p_interim;
    std::optional<double> p_final;
    int n_treatment = 0;
    std::optional<int> n_controls_interim;
    std::optional<int> n_controls_final;
    int entry_week = 0;
    int exit_week = 0;
    int duration_weeks = 0;  // exit_week - entry_week + 1
};

/// One randomized patient; retained only when the engine is asked to keep them.
struct PatientRecord {
    int week = 0;
    long period_id = 0;
    int arm_id = -1;  // -1 = control
    double baseline = 0.0;
    double week6 = 0.0;
};

struct ReplicateResult {
    std::vector<ComparisonResult> comparisons;
    long total_n = 0;
    long control_n = 0;
    int n_arms_tested = 0;
    int duration_weeks = 0;  // max arm exit week
    long n_periods = 1;
    bool failed = false;
    std::string error;
    std::vector<PatientRecord> patients;  // populated only with keep_patients
};

}  // namespace platsim
