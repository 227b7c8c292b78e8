#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "platsim/analysis.hpp"
#include "platsim/allocation.hpp"
#include "platsim/config.hpp"
#include "platsim/engine.hpp"
#include "platsim/ocs.hpp"
#include "platsim/rng.hpp"
#include "platsim/runner.hpp"
#include "platsim/stats.hpp"
#include "platsim/tdist.hpp"
#include "platsim/version.hpp"

namespace py = pybind11;
using ordered_json = nlohmann::ordered_json;
using namespace platsim;

namespace {

std::vector<std::string> validate_config(const std::string& text) {
    const auto grid = parse_config_text(text);
    std::vector<std::string> ids;
    ids.reserve(grid.scenarios.size());
    for (const auto& s : grid.scenarios) ids.push_back(s.scenario_id);
    return ids;
}

std::vector<std::string> run_config(const std::string& text, std::optional<std::uint64_t> seed,
                                    std::optional<int> replicates, int threads) {
    const auto grid = parse_config_text(text, seed, replicates);
    std::vector<std::string> out;
    out.reserve(grid.scenarios.size());
    for (const auto& cfg : grid.scenarios) {
        const auto run = run_scenario(cfg, threads, {});
        ordered_json agg;
        agg["tool_version"] = kVersion;
        agg["config"] = ordered_json::parse(serialize_scenario(cfg));
        agg["oc"] = ordered_json::parse(serialize_oc(run.oc));
        agg["failures"] = run.failures;
        out.push_back(agg.dump(2));
    }
    return out;
}

std::string run_replicate_json(const std::string& text, int replicate_index) {
    auto grid = parse_config_text(text);
    if (grid.scenarios.size() != 1)
        throw ConfigError("run_replicate expects a config without sweeps");
    const auto& cfg = grid.scenarios.front();
    RngStream rng = derive_stream(cfg.master_seed, static_cast<std::uint64_t>(replicate_index));
    const auto rep = run_replicate(cfg, rng, {});
    ordered_json j;
    j["total_n"] = rep.total_n;
    j["control_n"] = rep.control_n;
    j["n_arms_tested"] = rep.n_arms_tested;
    j["duration_weeks"] = rep.duration_weeks;
    j["n_periods"] = rep.n_periods;
    auto& comps = j["comparisons"] = ordered_json::array();
    for (const auto& c : rep.comparisons) {
        ordered_json cj;
        cj["arm_id"] = c.arm_id;
        cj["d"] = c.d;
        cj["decision"] = to_string(c.decision);
        cj["p_final"] = c.p_final ? ordered_json(*c.p_final) : ordered_json(nullptr);
        cj["p_interim"] = c.p_interim ? ordered_json(*c.p_interim) : ordered_json(nullptr);
        cj["n_treatment"] = c.n_treatment;
        cj["entry_week"] = c.entry_week;
        cj["exit_week"] = c.exit_week;
        comps.push_back(std::move(cj));
    }
    return j.dump(2);
}

py::dict fit_ancova_py(const std::vector<double>& y, const std::vector<double>& baseline,
                       const std::vector<int>& group, const std::vector<int>& period,
                       bool with_period) {
    if (y.size() != baseline.size() || y.size() != group.size())
        throw std::invalid_argument("y, baseline, group must have equal length");
    if (with_period && period.size() != y.size())
        throw std::invalid_argument("period must match y length when with_period is set");
    std::vector<AnalysisRow> rows(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        rows[i] = {y[i], baseline[i], group[i], with_period ? period[i] : 0};
    const auto fit = fit_ancova(rows, with_period ? CovariateSet::baseline_plus_period
                                                  : CovariateSet::baseline_only);
    py::dict d;
    d["beta"] = fit.beta;
    d["se"] = fit.se;
    d["t"] = fit.t;
    d["df"] = fit.df;
    d["p_one_sided"] = fit.p_one_sided;
    return d;
}

double control_ratio_py(const std::string& kind, int k, double cap) {
    AllocationPolicy policy;
    policy.kind = allocation_kind_from_string(kind);
    policy.cap = cap;
    return control_ratio(policy, k);
}

py::dict summarize_py(const std::vector<double>& values) {
    const auto s = summarize(values);
    py::dict d;
    d["median"] = s.median;
    d["q25"] = s.q25;
    d["q75"] = s.q75;
    d["n"] = s.n;
    return d;
}

}  // namespace

PYBIND11_MODULE(platsim, m) {
    m.doc() = "Monte Carlo evaluation of shared-control platform trial designs";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_RuntimeError);

    m.def("student_t_cdf", &student_t_cdf, py::arg("t"), py::arg("df"),
          "Cumulative distribution of Student's t");
    m.def("control_ratio", &control_ratio_py, py::arg("kind"), py::arg("k"),
          py::arg("cap") = 0.35, "Control allocation ratio for k active arms");
    m.def("summarize", &summarize_py, py::arg("values"),
          "Median and quartiles (type-7 interpolation)");
    m.def("validate_config", &validate_config, py::arg("text"),
          "Parse a scenario file; returns the expanded scenario ids");
    m.def("run_config", &run_config, py::arg("text"), py::arg("seed") = py::none(),
          py::arg("replicates") = py::none(), py::arg("threads") = 1,
          "Run every scenario in a config; returns aggregate JSON strings");
    m.def("run_replicate", &run_replicate_json, py::arg("text"), py::arg("replicate_index") = 0,
          "Run a single replicate; returns a JSON summary");
    m.def("fit_ancova", &fit_ancova_py, py::arg("y"), py::arg("baseline"), py::arg("group"),
          py::arg("period") = std::vector<int>{}, py::arg("with_period") = false,
          "Covariate-adjusted two-group comparison; returns beta/se/t/df/p");
}
