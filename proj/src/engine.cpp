#include "platsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "platsim/allocation.hpp"
#include "platsim/analysis.hpp"
#include "platsim/outcome.hpp"

namespace platsim {

namespace {

struct Pat {
    int week;
    long period;
    double baseline;
    double week6;
};

struct ArmSim {
    int id = 0;
    int effect_index = 0;
    int entry_week = 0;
    std::vector<Pat> pats;
    bool interim_done = false;
    std::optional<double> p_interim;
    std::optional<int> nc_interim;
};

int draw_arrivals(RngStream& rng, const std::vector<std::pair<int, double>>& law) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto& [count, prob] : law) {
        acc += prob;
        if (u < acc) return count;
    }
    return law.back().first;
}

double mean_arrivals(const std::vector<std::pair<int, double>>& law) {
    double acc = 0.0;
    for (const auto& [count, prob] : law) acc += count * prob;
    return acc;
}

/// Assemble the arm-vs-concurrent-controls dataset through `week` (inclusive).
std::vector<AnalysisRow> build_dataset(const ArmSim& arm, const std::vector<Pat>& controls,
                                       int week, int* n_controls) {
    auto lo = std::lower_bound(controls.begin(), controls.end(), arm.entry_week,
                               [](const Pat& p, int w) { return p.week < w; });
    auto hi = std::upper_bound(controls.begin(), controls.end(), week,
                               [](int w, const Pat& p) { return w < p.week; });
    *n_controls = static_cast<int>(hi - lo);
    std::vector<AnalysisRow> rows;
    rows.reserve(static_cast<std::size_t>(*n_controls) + arm.pats.size());
    for (auto it = lo; it != hi; ++it) rows.push_back({it->week6, it->baseline, 0, it->period});
    for (const auto& p : arm.pats) rows.push_back({p.week6, p.baseline, 1, p.period});
    return rows;
}

}  // namespace

ReplicateResult run_replicate(const ScenarioConfig& config, RngStream rng,
                              const EngineOptions& options) {
    ScenarioConfig cfg = config;
    if (cfg.mode == TrialMode::two_arm_series) {
        cfg.allocation = {AllocationKind::balanced, 0.0};
        cfg.randomization = RandomizationType::modified_block;
        cfg.initial_arms = 1;
        cfg.max_concurrent_arms = 1;
    }
    cfg.validate();

    const auto calib = OutcomeCalibration::standard();
    const int horizon = cfg.entry_horizon_weeks();
    const int n_target = cfg.target_n_per_arm;
    const int interim_at =
        cfg.interim_fraction
            ? static_cast<int>(std::ceil(*cfg.interim_fraction * n_target))
            : 0;
    const double gate_rate = mean_arrivals(cfg.recruitment_law) *
                             (1.0 - control_ratio(cfg.allocation, cfg.max_concurrent_arms)) /
                             cfg.max_concurrent_arms;
    const double accrual_floor = cfg.min_expected_accrual_fraction * n_target;

    auto log = [&](int week, const std::string& line) {
        if (options.event_log)
            (*options.event_log) << options.log_prefix << "week=" << week << ' ' << line << '\n';
    };

    std::vector<ArmSim> arms;
    std::vector<int> active;  // arm ids, ascending
    auto enter_arm = [&](int week) {
        ArmSim a;
        a.id = static_cast<int>(arms.size());
        a.effect_index = draw_effect(rng, cfg.effect_distribution);
        a.entry_week = week;
        active.push_back(a.id);
        log(week, "event=enter arm=" + std::to_string(a.id) +
                      " d=" + std::to_string(EffectDistribution::kGrid[
                                  static_cast<std::size_t>(a.effect_index)]));
        arms.push_back(std::move(a));
    };
    for (int i = 0; i < cfg.initial_arms; ++i) enter_arm(1);

    std::vector<Pat> controls;
    BlockRandomizer block;
    ReplicateResult out;
    std::vector<int> prev_set = active;
    long period = 0;
    int week = 0;

    while (true) {
        ++week;
        if (week > 100000) throw std::runtime_error("run_replicate: runaway loop");

        // 1. Monthly entry attempts. Max-capacity designs refill every free slot;
        //    sub-capacity designs draw one Bernoulli(entry_probability) per month.
        //    The accrual gate projects the full-capacity per-arm rate over the
        //    months remaining after the current one.
        if (week % 4 == 1 && week > 1 && week <= horizon) {
            const int free = cfg.max_concurrent_arms - static_cast<int>(active.size());
            const int attempts =
                cfg.entry_probability_per_month < 1.0 ? std::min(free, 1) : free;
            for (int i = 0; i < attempts; ++i) {
                if (static_cast<int>(active.size()) >= cfg.max_concurrent_arms) break;
                if (cfg.entry_probability_per_month < 1.0 &&
                    !(rng.uniform() < cfg.entry_probability_per_month))
                    continue;
                const int remaining_weeks = horizon - week - 3;
                if (remaining_weeks * gate_rate >= accrual_floor) enter_arm(week);
            }
        }

        // 2. Period bookkeeping: one increment per week with an active-set change.
        if (active != prev_set) {
            ++period;
            prev_set = active;
            log(week, "event=period period=" + std::to_string(period));
        }

        // 3. Weekly recruitment over arms still short of target.
        std::vector<int> open;
        for (int id : active)
            if (static_cast<int>(arms[static_cast<std::size_t>(id)].pats.size()) < n_target)
                open.push_back(id);
        if (!open.empty()) {
            const int arrivals = draw_arrivals(rng, cfg.recruitment_law);
            for (int i = 0; i < arrivals && !open.empty(); ++i) {
                const int assignment =
                    cfg.randomization == RandomizationType::simple
                        ? next_assignment_simple(rng, open, cfg.allocation)
                        : block.next(rng, open, cfg.allocation);
                const bool is_control = assignment == kControl;
                auto& arm = arms[static_cast<std::size_t>(std::max(assignment, 0))];
                const auto [x, y] = generate_outcome(
                    rng, is_control, is_control ? 0 : arm.effect_index, period, calib,
                    cfg.time_trend);
                ++out.total_n;
                if (is_control) {
                    ++out.control_n;
                    controls.push_back({week, period, x, y});
                } else {
                    arm.pats.push_back({week, period, x, y});
                    if (static_cast<int>(arm.pats.size()) >= n_target)
                        open.erase(std::find(open.begin(), open.end(), assignment));
                }
                if (options.keep_patients)
                    out.patients.push_back({week, period, is_control ? -1 : assignment, x, y});
            }
        }

        // 4./5. Interim and final analyses; exits take effect in next week's set.
        bool removed = false;
        const std::vector<int> to_check = active;
        for (int id : to_check) {
            ArmSim& arm = arms[static_cast<std::size_t>(id)];
            const int n_t = static_cast<int>(arm.pats.size());
            if (interim_at > 0 && !arm.interim_done && n_t >= interim_at) {
                arm.interim_done = true;
                int n_c = 0;
                const auto fit =
                    fit_ancova(build_dataset(arm, controls, week, &n_c), cfg.analysis_covariates);
                arm.p_interim = fit.p_one_sided;
                arm.nc_interim = n_c;
                log(week, "event=interim arm=" + std::to_string(id) +
                              " p=" + std::to_string(fit.p_one_sided));
                if (cfg.futility_boundary && interim_stops(fit, *cfg.futility_boundary)) {
                    ComparisonResult cr;
                    cr.arm_id = id;
                    cr.effect_index = arm.effect_index;
                    cr.d = EffectDistribution::kGrid[static_cast<std::size_t>(arm.effect_index)];
                    cr.decision = Decision::stopped_futility;
                    cr.p_interim = arm.p_interim;
                    cr.n_treatment = n_t;
                    cr.n_controls_interim = arm.nc_interim;
                    cr.entry_week = arm.entry_week;
                    cr.exit_week = week;
                    cr.duration_weeks = week - arm.entry_week + 1;
                    out.comparisons.push_back(cr);
                    active.erase(std::find(active.begin(), active.end(), id));
                    removed = true;
                    log(week, "event=exit arm=" + std::to_string(id) + " decision=stopped_futility");
                    continue;
                }
            }
            if (n_t >= n_target) {
                int n_c = 0;
                const auto fit =
                    fit_ancova(build_dataset(arm, controls, week, &n_c), cfg.analysis_covariates);
                ComparisonResult cr;
                cr.arm_id = id;
                cr.effect_index = arm.effect_index;
                cr.d = EffectDistribution::kGrid[static_cast<std::size_t>(arm.effect_index)];
                cr.decision = final_succeeds(fit, cfg.alpha) ? Decision::success : Decision::failure;
                cr.p_interim = arm.p_interim;
                cr.p_final = fit.p_one_sided;
                cr.n_treatment = n_t;
                cr.n_controls_interim = arm.nc_interim;
                cr.n_controls_final = n_c;
                cr.entry_week = arm.entry_week;
                cr.exit_week = week;
                cr.duration_weeks = week - arm.entry_week + 1;
                out.comparisons.push_back(cr);
                active.erase(std::find(active.begin(), active.end(), id));
                removed = true;
                log(week, "event=exit arm=" + std::to_string(id) +
                              " decision=" + to_string(cr.decision));
            }
        }
        if (removed) block.invalidate();

        if (active.empty() && week >= horizon) break;
    }

    out.n_arms_tested = static_cast<int>(out.comparisons.size());
    out.n_periods = period + 1;
    for (const auto& c : out.comparisons) out.duration_weeks = std::max(out.duration_weeks, c.exit_week);
    return out;
}

}  // namespace platsim
