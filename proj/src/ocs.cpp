#include "platsim/ocs.hpp"

#include <stdexcept>

#include <json.hpp>

namespace platsim {

OperatingCharacteristics aggregate(const std::vector<ReplicateResult>& results) {
    if (results.empty()) throw std::invalid_argument("aggregate: no replicate results");

    OperatingCharacteristics oc;
    std::vector<double> totals, control_totals, narms, ap1000, pdur;
    std::vector<double> arm_n, arm_dur, nc_final, nc_interim;
    for (const auto& r : results) {
        if (r.failed) continue;
        ++oc.replicates;
        totals.push_back(static_cast<double>(r.total_n));
        control_totals.push_back(static_cast<double>(r.control_n));
        narms.push_back(static_cast<double>(r.n_arms_tested));
        ap1000.push_back(r.total_n > 0 ? 1000.0 * r.n_arms_tested / static_cast<double>(r.total_n)
                                       : 0.0);
        pdur.push_back(static_cast<double>(r.duration_weeks));
        for (const auto& c : r.comparisons) {
            auto& e = oc.per_effect[static_cast<std::size_t>(c.effect_index)];
            ++e.n_comparisons;
            ++oc.total_comparisons;
            switch (c.decision) {
                case Decision::success: ++e.n_success; break;
                case Decision::failure: ++e.n_failure; break;
                case Decision::stopped_futility: ++e.n_futility; break;
            }
            arm_n.push_back(static_cast<double>(c.n_treatment));
            arm_dur.push_back(static_cast<double>(c.duration_weeks));
            if (c.n_controls_final) nc_final.push_back(static_cast<double>(*c.n_controls_final));
            if (c.n_controls_interim)
                nc_interim.push_back(static_cast<double>(*c.n_controls_interim));
        }
    }
    if (oc.replicates == 0) throw std::invalid_argument("aggregate: all replicates failed");

    for (std::size_t i = 0; i < oc.per_effect.size(); ++i) {
        auto& e = oc.per_effect[i];
        e.d = EffectDistribution::kGrid[i];
        if (e.n_comparisons == 0) continue;
        const auto n = static_cast<double>(e.n_comparisons);
        e.success_rate = e.n_success / n;
        e.failure_rate = e.n_failure / n;
        e.futility_rate = e.n_futility / n;
        const auto nn = static_cast<std::size_t>(e.n_comparisons);
        e.se_success = mc_error(e.success_rate, nn);
        e.se_failure = mc_error(e.failure_rate, nn);
        e.se_futility = mc_error(e.futility_rate, nn);
    }

    oc.total_n = summarize(std::move(totals));
    oc.control_n = summarize(std::move(control_totals));
    oc.n_arms = summarize(std::move(narms));
    oc.arms_per_1000 = summarize(std::move(ap1000));
    oc.platform_duration_weeks = summarize(std::move(pdur));
    if (!arm_n.empty()) {
        oc.per_arm_n = summarize(std::move(arm_n));
        oc.arm_duration_weeks = summarize(std::move(arm_dur));
    }
    if (!nc_final.empty()) oc.controls_final = summarize(std::move(nc_final));
    if (!nc_interim.empty()) oc.controls_interim = summarize(std::move(nc_interim));
    return oc;
}

namespace {

nlohmann::ordered_json stats_json(const SummaryStats& s) {
    return {{"median", s.median}, {"q25", s.q25}, {"q75", s.q75}, {"n", s.n}};
}

}  // namespace

std::string serialize_oc(const OperatingCharacteristics& oc) {
    nlohmann::ordered_json j;
    j["replicates"] = oc.replicates;
    j["total_comparisons"] = oc.total_comparisons;
    auto& eff = j["per_effect"] = nlohmann::ordered_json::array();
    for (const auto& e : oc.per_effect) {
        eff.push_back({{"d", e.d},
                       {"n_comparisons", e.n_comparisons},
                       {"n_success", e.n_success},
                       {"n_failure", e.n_failure},
                       {"n_stopped_futility", e.n_futility},
                       {"success_rate", e.success_rate},
                       {"failure_rate", e.failure_rate},
                       {"futility_rate", e.futility_rate},
                       {"mc_se_success", e.se_success},
                       {"mc_se_failure", e.se_failure},
                       {"mc_se_futility", e.se_futility}});
    }
    j["total_n"] = stats_json(oc.total_n);
    j["control_n"] = stats_json(oc.control_n);
    j["n_arms"] = stats_json(oc.n_arms);
    j["arms_per_1000"] = stats_json(oc.arms_per_1000);
    j["platform_duration_weeks"] = stats_json(oc.platform_duration_weeks);
    j["per_arm_n"] = stats_json(oc.per_arm_n);
    j["arm_duration_weeks"] = stats_json(oc.arm_duration_weeks);
    j["controls_final"] = oc.controls_final ? stats_json(*oc.controls_final)
                                            : nlohmann::ordered_json(nullptr);
    j["controls_interim"] = oc.controls_interim ? stats_json(*oc.controls_interim)
                                                : nlohmann::ordered_json(nullptr);
    return j.dump(2);
}

}  // namespace platsim
