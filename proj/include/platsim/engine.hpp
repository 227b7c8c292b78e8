#pragma once

#include <iosfwd>
#include <string>

#include "platsim/model.hpp"
#include "platsim/rng.hpp"

namespace platsim {

struct EngineOptions {
    bool keep_patients = false;      // retain per-patient records in the result
    std::ostream* event_log = nullptr;  // one line per entry/exit/analysis event
    std::string log_prefix;          // prepended to every event line
};

/// Run one replicate of the configured design.
///
/// Platform mode executes the weekly loop: monthly entry attempts (gated by the
/// projected-accrual rule), period bookkeeping on active-set changes, weekly
/// recruitment and randomization with immediate outcomes, then interim and
/// final analyses against concurrent controls. two_arm_series mode runs the
/// same loop restricted to one 1:1 block-randomized trial at a time, so trials
/// execute back-to-back under the same entry gate and horizon.
///
/// Throws AnalysisError if any model fit degenerates (surfaced per replicate).
ReplicateResult run_replicate(const ScenarioConfig& config, RngStream rng,
                              const EngineOptions& options = {});

}  // namespace platsim
