#include "platsim/runner.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace platsim {

ScenarioRun run_scenario(const ScenarioConfig& config, int threads, const EngineOptions& options,
                         double max_failure_fraction) {
    config.validate();
    const auto n = static_cast<std::size_t>(config.replicates);
    ScenarioRun run;
    run.replicates.resize(n);

    auto one = [&](std::size_t i) {
        EngineOptions opts = options;
        opts.log_prefix = options.log_prefix + "replicate=" + std::to_string(i) + " ";
        try {
            run.replicates[i] = run_replicate(config, derive_stream(config.master_seed, i), opts);
        } catch (const AnalysisError& e) {
            run.replicates[i].failed = true;
            run.replicates[i].error = e.what();
        }
    };

    if (threads <= 1 || n <= 1 || options.event_log != nullptr) {
        for (std::size_t i = 0; i < n; ++i) one(i);
    } else {
        const auto workers = static_cast<std::size_t>(threads) < n
                                 ? static_cast<std::size_t>(threads)
                                 : n;
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    try {
                        one(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    for (const auto& r : run.replicates) run.failures += r.failed ? 1 : 0;
    if (run.failures > max_failure_fraction * static_cast<double>(n))
        throw std::runtime_error("run_scenario: " + std::to_string(run.failures) + " of " +
                                 std::to_string(n) + " replicates failed analysis");
    run.oc = aggregate(run.replicates);
    return run;
}

}  // namespace platsim
