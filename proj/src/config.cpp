#include "platsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

namespace platsim {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::set<std::string> kTopLevelKeys = {
    "scenario_id",       "mode",
    "randomization",     "allocation",
    "analysis_covariates", "interim_fraction",
    "futility_boundary", "target_n_per_arm",
    "initial_arms",      "entry_probability_per_month",
    "max_concurrent_arms", "entry_horizon_months",
    "min_expected_accrual_fraction", "effect_distribution",
    "time_trend",        "recruitment_law",
    "alpha",             "replicates",
    "master_seed",       "sweeps"};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at '" + path + "': " + what);
}

void check_keys(const ordered_json& obj, const std::set<std::string>& known,
                const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (known.find(key) == known.end()) fail(path + "/" + key, "unknown key");
    }
}

double get_number(const ordered_json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int get_integer(const ordered_json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

std::uint64_t get_u64(const ordered_json& v, const std::string& path) {
    if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)))
        fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string get_string(const ordered_json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

AllocationPolicy parse_allocation(const ordered_json& v, const std::string& path) {
    AllocationPolicy p;
    std::string kind;
    if (v.is_string()) {
        kind = v.get<std::string>();
    } else if (v.is_object()) {
        check_keys(v, {"kind", "cap"}, path);
        if (!v.contains("kind")) fail(path, "allocation object requires 'kind'");
        kind = get_string(v["kind"], path + "/kind");
        if (v.contains("cap")) {
            if (kind != "sqrt_k_capped") fail(path + "/cap", "cap applies to sqrt_k_capped only");
            p.cap = get_number(v["cap"], path + "/cap");
        }
    } else {
        fail(path, "expected a string or an object");
    }
    if (kind == "balanced") p.kind = AllocationKind::balanced;
    else if (kind == "k_alloc") p.kind = AllocationKind::k_alloc;
    else if (kind == "sqrt_k") p.kind = AllocationKind::sqrt_k;
    else if (kind == "sqrt_k_capped") p.kind = AllocationKind::sqrt_k_capped;
    else fail(path, "unknown allocation kind '" + kind + "'");
    return p;
}

EffectDistribution parse_effect_distribution(const ordered_json& v, const std::string& path) {
    if (v.is_string()) {
        const auto name = v.get<std::string>();
        if (name == "equal") return EffectDistribution::equal();
        if (name == "pessimistic") return EffectDistribution::pessimistic();
        fail(path, "unknown effect distribution '" + name + "'");
    }
    if (!v.is_object()) fail(path, "expected a string or an object");
    const std::array<std::string, 4> keys{"0", "0.2", "0.35", "0.5"};
    check_keys(v, {keys.begin(), keys.end()}, path);
    EffectDistribution dist;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (!v.contains(keys[i])) fail(path, "missing probability for d=" + keys[i]);
        dist.theta[i] = get_number(v[keys[i]], path + "/" + keys[i]);
    }
    return dist;
}

TimeTrend parse_time_trend(const ordered_json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    check_keys(v, {"step_fraction", "interpretation"}, path);
    TimeTrend t;
    if (!v.contains("step_fraction")) fail(path, "time_trend requires 'step_fraction'");
    t.step_fraction = get_number(v["step_fraction"], path + "/step_fraction");
    if (v.contains("interpretation")) {
        const auto s = get_string(v["interpretation"], path + "/interpretation");
        if (s == "variance") t.interpretation = TrendInterpretation::variance;
        else if (s == "sd") t.interpretation = TrendInterpretation::sd;
        else fail(path + "/interpretation", "expected 'variance' or 'sd'");
    }
    return t;
}

std::vector<std::pair<int, double>> parse_recruitment_law(const ordered_json& v,
                                                          const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object of {arrivals: probability}");
    std::vector<std::pair<int, double>> law;
    for (const auto& [key, value] : v.items()) {
        int count = 0;
        try {
            std::size_t pos = 0;
            count = std::stoi(key, &pos);
            if (pos != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            fail(path + "/" + key, "arrival count keys must be integers");
        }
        law.emplace_back(count, get_number(value, path + "/" + key));
    }
    std::sort(law.begin(), law.end());
    for (std::size_t i = 1; i < law.size(); ++i)
        if (law[i].first == law[i - 1].first)
            fail(path, "duplicate arrival count " + std::to_string(law[i].first));
    return law;
}

ScenarioConfig parse_scenario(const ordered_json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    check_keys(obj, kTopLevelKeys, path);
    if (obj.contains("sweeps")) fail(path + "/sweeps", "sweeps are only valid at the top level");

    ScenarioConfig c;
    if (obj.contains("scenario_id")) c.scenario_id = get_string(obj["scenario_id"], path + "/scenario_id");
    if (obj.contains("mode")) {
        const auto s = get_string(obj["mode"], path + "/mode");
        if (s == "platform") c.mode = TrialMode::platform;
        else if (s == "two_arm_series") c.mode = TrialMode::two_arm_series;
        else fail(path + "/mode", "expected 'platform' or 'two_arm_series'");
    }
    if (obj.contains("randomization")) {
        const auto s = get_string(obj["randomization"], path + "/randomization");
        if (s == "simple") c.randomization = RandomizationType::simple;
        else if (s == "modified_block") c.randomization = RandomizationType::modified_block;
        else fail(path + "/randomization", "expected 'simple' or 'modified_block'");
    }
    if (obj.contains("allocation"))
        c.allocation = parse_allocation(obj["allocation"], path + "/allocation");
    if (obj.contains("analysis_covariates")) {
        const auto s = get_string(obj["analysis_covariates"], path + "/analysis_covariates");
        if (s == "baseline_only") c.analysis_covariates = CovariateSet::baseline_only;
        else if (s == "baseline_plus_period") c.analysis_covariates = CovariateSet::baseline_plus_period;
        else fail(path + "/analysis_covariates", "expected 'baseline_only' or 'baseline_plus_period'");
    }
    if (obj.contains("interim_fraction") && !obj["interim_fraction"].is_null())
        c.interim_fraction = get_number(obj["interim_fraction"], path + "/interim_fraction");
    if (obj.contains("futility_boundary") && !obj["futility_boundary"].is_null())
        c.futility_boundary = get_number(obj["futility_boundary"], path + "/futility_boundary");
    if (obj.contains("target_n_per_arm"))
        c.target_n_per_arm = get_integer(obj["target_n_per_arm"], path + "/target_n_per_arm");
    if (obj.contains("initial_arms"))
        c.initial_arms = get_integer(obj["initial_arms"], path + "/initial_arms");
    if (obj.contains("entry_probability_per_month"))
        c.entry_probability_per_month =
            get_number(obj["entry_probability_per_month"], path + "/entry_probability_per_month");
    if (obj.contains("max_concurrent_arms"))
        c.max_concurrent_arms = get_integer(obj["max_concurrent_arms"], path + "/max_concurrent_arms");
    if (obj.contains("entry_horizon_months"))
        c.entry_horizon_months = get_integer(obj["entry_horizon_months"], path + "/entry_horizon_months");
    if (obj.contains("min_expected_accrual_fraction"))
        c.min_expected_accrual_fraction = get_number(obj["min_expected_accrual_fraction"],
                                                     path + "/min_expected_accrual_fraction");
    if (obj.contains("effect_distribution"))
        c.effect_distribution =
            parse_effect_distribution(obj["effect_distribution"], path + "/effect_distribution");
    if (obj.contains("time_trend") && !obj["time_trend"].is_null())
        c.time_trend = parse_time_trend(obj["time_trend"], path + "/time_trend");
    if (obj.contains("recruitment_law"))
        c.recruitment_law = parse_recruitment_law(obj["recruitment_law"], path + "/recruitment_law");
    if (obj.contains("alpha")) c.alpha = get_number(obj["alpha"], path + "/alpha");
    if (obj.contains("replicates")) c.replicates = get_integer(obj["replicates"], path + "/replicates");
    if (obj.contains("master_seed")) c.master_seed = get_u64(obj["master_seed"], path + "/master_seed");

    if (c.mode == TrialMode::two_arm_series) {
        // The comparator profile: one 1:1 block-randomized trial at a time.
        c.allocation = {AllocationKind::balanced, 0.0};
        c.randomization = RandomizationType::modified_block;
        c.initial_arms = 1;
        c.max_concurrent_arms = 1;
    }

    try {
        c.validate();
    } catch (const ConfigError& e) {
        fail(path, e.what());
    }
    return c;
}

std::string slug_of(const ordered_json& v) {
    std::string raw;
    if (v.is_null()) raw = "none";
    else if (v.is_string()) raw = v.get<std::string>();
    else if (v.is_object() && v.contains("kind")) raw = v["kind"].get<std::string>();
    else if (v.is_object() && v.contains("step_fraction")) raw = v["step_fraction"].dump();
    else raw = v.dump();
    std::string out;
    for (char ch : raw) {
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' || ch == '-')
            out.push_back(ch);
        else out.push_back('_');
    }
    return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ScenarioGrid parse_config_text(const std::string& text,
                               const std::optional<std::uint64_t>& seed_override,
                               const std::optional<int>& replicates_override) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config error at '': expected a JSON object");
    check_keys(root, kTopLevelKeys, "");

    ordered_json base = root;
    base.erase("sweeps");
    if (seed_override) base["master_seed"] = *seed_override;
    if (replicates_override) base["replicates"] = *replicates_override;

    ScenarioGrid grid;
    grid.base = parse_scenario(base, "");

    std::vector<std::pair<std::string, ordered_json>> sweeps;
    if (root.contains("sweeps")) {
        const auto& sw = root["sweeps"];
        if (!sw.is_object()) throw ConfigError("config error at '/sweeps': expected an object");
        for (const auto& [key, values] : sw.items()) {
            if (kTopLevelKeys.find(key) == kTopLevelKeys.end() || key == "sweeps" ||
                key == "scenario_id")
                fail("/sweeps/" + key, "not a sweepable parameter");
            if (!values.is_array() || values.empty())
                fail("/sweeps/" + key, "expected a non-empty array of values");
            sweeps.emplace_back(key, values);
        }
    }

    std::size_t count = 1;
    for (const auto& [key, values] : sweeps) count *= values.size();
    int width = 3;
    for (std::size_t c = count; c > 999; c /= 10) ++width;

    for (std::size_t idx = 0; idx < count; ++idx) {
        ordered_json patched = base;
        std::string slug;
        std::size_t rem = idx;
        // First-declared sweep varies slowest (outermost loop).
        std::size_t block_size = count;
        for (const auto& [key, values] : sweeps) {
            block_size /= values.size();
            const auto& value = values[(rem / block_size) % values.size()];
            rem %= block_size;
            if (value.is_null()) patched.erase(key);
            else patched[key] = value;
            slug += "-" + key + "=" + slug_of(value);
        }
        auto cfg = parse_scenario(patched, "/sweeps[" + std::to_string(idx) + "]");
        std::string num = std::to_string(idx);
        num.insert(num.begin(), static_cast<std::size_t>(width) - num.size(), '0');
        cfg.scenario_id = "s" + num + slug;
        grid.scenarios.push_back(std::move(cfg));
    }

    ordered_json digest_doc;
    digest_doc["base"] = ordered_json::parse(serialize_scenario(grid.base));
    digest_doc["sweeps"] = ordered_json::object();
    for (const auto& [key, values] : sweeps) digest_doc["sweeps"][key] = values;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(digest_doc.dump())));
    grid.digest_hex = hex;
    return grid;
}

std::string serialize_scenario(const ScenarioConfig& c) {
    ordered_json j;
    j["scenario_id"] = c.scenario_id;
    j["mode"] = to_string(c.mode);
    j["randomization"] = to_string(c.randomization);
    if (c.allocation.kind == AllocationKind::sqrt_k_capped)
        j["allocation"] = {{"kind", to_string(c.allocation.kind)}, {"cap", c.allocation.cap}};
    else
        j["allocation"] = to_string(c.allocation.kind);
    j["analysis_covariates"] = to_string(c.analysis_covariates);
    j["interim_fraction"] =
        c.interim_fraction ? ordered_json(*c.interim_fraction) : ordered_json(nullptr);
    j["futility_boundary"] =
        c.futility_boundary ? ordered_json(*c.futility_boundary) : ordered_json(nullptr);
    j["target_n_per_arm"] = c.target_n_per_arm;
    j["initial_arms"] = c.initial_arms;
    j["entry_probability_per_month"] = c.entry_probability_per_month;
    j["max_concurrent_arms"] = c.max_concurrent_arms;
    j["entry_horizon_months"] = c.entry_horizon_months;
    j["min_expected_accrual_fraction"] = c.min_expected_accrual_fraction;
    {
        ordered_json dist;
        dist["0"] = c.effect_distribution.theta[0];
        dist["0.2"] = c.effect_distribution.theta[1];
        dist["0.35"] = c.effect_distribution.theta[2];
        dist["0.5"] = c.effect_distribution.theta[3];
        j["effect_distribution"] = dist;
    }
    if (c.time_trend)
        j["time_trend"] = {{"step_fraction", c.time_trend->step_fraction},
                           {"interpretation", to_string(c.time_trend->interpretation)}};
    else
        j["time_trend"] = nullptr;
    {
        ordered_json law;
        for (const auto& [count, prob] : c.recruitment_law) law[std::to_string(count)] = prob;
        j["recruitment_law"] = law;
    }
    j["alpha"] = c.alpha;
    j["replicates"] = c.replicates;
    j["master_seed"] = c.master_seed;
    return j.dump(2);
}

}  // namespace platsim
