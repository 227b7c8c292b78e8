#pragma once

#include <vector>

#include "platsim/engine.hpp"
#include "platsim/model.hpp"
#include "platsim/ocs.hpp"

namespace platsim {

struct ScenarioRun {
    OperatingCharacteristics oc;
    std::vector<ReplicateResult> replicates;  // indexed by replicate id
    int failures = 0;
};

/// Run every replicate of one scenario and aggregate.
///
/// Replicate i always uses derive_stream(master_seed, i), so results are
/// byte-identical for any thread count. Replicates that raise AnalysisError are
/// recorded as failed and excluded from aggregation; exceeding
/// `max_failure_fraction` aborts with std::runtime_error. An event log forces
/// single-threaded execution to keep the log ordered.
ScenarioRun run_scenario(const ScenarioConfig& config, int threads,
                         const EngineOptions& options = {},
                         double max_failure_fraction = 0.001);

}  // namespace platsim
