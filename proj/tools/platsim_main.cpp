#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "platsim/config.hpp"
#include "platsim/model.hpp"
#include "platsim/outcome.hpp"
#include "platsim/runner.hpp"
#include "platsim/version.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace platsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f << content;
        if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

/// Shortest round-trip decimal rendering (matches the JSON outputs).
std::string fmt_num(double v) { return ordered_json(v).dump(); }

std::string csv_opt(const ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

/// Flatten one aggregate.json document into a CSV header/row pair.
std::pair<std::vector<std::string>, std::vector<std::string>> flatten_aggregate(
    const ordered_json& agg) {
    std::vector<std::string> header, row;
    auto put = [&](const std::string& key, const std::string& value) {
        header.push_back(key);
        row.push_back(value);
    };
    const auto& cfg = agg.at("config");
    put("scenario_id", cfg.at("scenario_id").get<std::string>());
    put("mode", cfg.at("mode").get<std::string>());
    put("randomization", cfg.at("randomization").get<std::string>());
    const auto& alloc = cfg.at("allocation");
    if (alloc.is_object()) {
        put("allocation", alloc.at("kind").get<std::string>());
        put("allocation_cap", fmt_num(alloc.at("cap").get<double>()));
    } else {
        put("allocation", alloc.get<std::string>());
        put("allocation_cap", "");
    }
    put("analysis_covariates", cfg.at("analysis_covariates").get<std::string>());
    put("interim_fraction", csv_opt(cfg.at("interim_fraction")));
    put("futility_boundary", csv_opt(cfg.at("futility_boundary")));
    put("target_n_per_arm", cfg.at("target_n_per_arm").dump());
    put("initial_arms", cfg.at("initial_arms").dump());
    put("entry_probability_per_month", cfg.at("entry_probability_per_month").dump());
    put("max_concurrent_arms", cfg.at("max_concurrent_arms").dump());
    put("time_trend_step", cfg.at("time_trend").is_null()
                               ? ""
                               : cfg.at("time_trend").at("step_fraction").dump());
    put("time_trend_interpretation", cfg.at("time_trend").is_null()
                                         ? ""
                                         : cfg.at("time_trend").at("interpretation").get<std::string>());
    for (const char* d : {"0", "0.2", "0.35", "0.5"})
        put(std::string("theta_") + d, cfg.at("effect_distribution").at(d).dump());
    put("alpha", cfg.at("alpha").dump());
    put("master_seed", cfg.at("master_seed").dump());
    put("replicates", cfg.at("replicates").dump());

    const auto& oc = agg.at("oc");
    put("usable_replicates", oc.at("replicates").dump());
    put("total_comparisons", oc.at("total_comparisons").dump());
    for (const auto& e : oc.at("per_effect")) {
        const std::string d = fmt_num(e.at("d").get<double>());
        put("n_comparisons_d" + d, e.at("n_comparisons").dump());
        put("success_rate_d" + d, e.at("success_rate").dump());
        put("mc_se_success_d" + d, e.at("mc_se_success").dump());
        put("futility_rate_d" + d, e.at("futility_rate").dump());
        put("mc_se_futility_d" + d, e.at("mc_se_futility").dump());
    }
    for (const char* key : {"total_n", "control_n", "n_arms", "arms_per_1000",
                            "platform_duration_weeks", "per_arm_n", "arm_duration_weeks",
                            "controls_final", "controls_interim"}) {
        const auto& s = oc.at(key);
        if (s.is_null()) {
            put(std::string(key) + "_median", "");
            put(std::string(key) + "_q25", "");
            put(std::string(key) + "_q75", "");
        } else {
            put(std::string(key) + "_median", s.at("median").dump());
            put(std::string(key) + "_q25", s.at("q25").dump());
            put(std::string(key) + "_q75", s.at("q75").dump());
        }
    }
    return {header, row};
}

std::string join_csv(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line.push_back(',');
        line += cells[i];
    }
    line.push_back('\n');
    return line;
}

std::string replicates_csv(const ScenarioConfig& cfg, const ScenarioRun& run) {
    std::string out = "scenario_id,replicate,failed,total_n,control_n,n_arms,duration_weeks,"
                      "periods,arms_per_1000\n";
    for (std::size_t i = 0; i < run.replicates.size(); ++i) {
        const auto& r = run.replicates[i];
        out += cfg.scenario_id;
        out += ',' + std::to_string(i);
        out += ',' + std::string(r.failed ? "1" : "0");
        out += ',' + std::to_string(r.total_n);
        out += ',' + std::to_string(r.control_n);
        out += ',' + std::to_string(r.n_arms_tested);
        out += ',' + std::to_string(r.duration_weeks);
        out += ',' + std::to_string(r.n_periods);
        out += ',' + (r.total_n > 0
                          ? fmt_num(1000.0 * r.n_arms_tested / static_cast<double>(r.total_n))
                          : std::string(""));
        out += '\n';
    }
    return out;
}

std::string comparisons_csv(const ScenarioConfig& cfg, const ScenarioRun& run) {
    std::string out = "scenario_id,replicate,arm_id,d,decision,p_interim,p_final,n_treatment,"
                      "n_controls_interim,n_controls_final,entry_week,exit_week,duration_weeks\n";
    auto opt_num = [](const std::optional<double>& v) {
        return v ? fmt_num(*v) : std::string("");
    };
    auto opt_int = [](const std::optional<int>& v) {
        return v ? std::to_string(*v) : std::string("");
    };
    for (std::size_t i = 0; i < run.replicates.size(); ++i) {
        for (const auto& c : run.replicates[i].comparisons) {
            out += cfg.scenario_id;
            out += ',' + std::to_string(i);
            out += ',' + std::to_string(c.arm_id);
            out += ',' + fmt_num(c.d);
            out += ',' + to_string(c.decision);
            out += ',' + opt_num(c.p_interim);
            out += ',' + opt_num(c.p_final);
            out += ',' + std::to_string(c.n_treatment);
            out += ',' + opt_int(c.n_controls_interim);
            out += ',' + opt_int(c.n_controls_final);
            out += ',' + std::to_string(c.entry_week);
            out += ',' + std::to_string(c.exit_week);
            out += ',' + std::to_string(c.duration_weeks);
            out += '\n';
        }
    }
    return out;
}

int cmd_validate(const std::string& config_path) {
    const auto grid = parse_config_text(read_file(config_path));
    std::cout << "config OK: " << grid.scenarios.size() << " scenario(s), digest "
              << grid.digest_hex << "\n";
    for (const auto& s : grid.scenarios) std::cout << "  " << s.scenario_id << "\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, std::optional<int> replicates, int threads,
            bool force, bool verbose_events) {
    const auto started = std::chrono::steady_clock::now();
    const auto grid = parse_config_text(read_file(config_path), seed, replicates);

    const fs::path out(out_dir);
    if (fs::exists(out) && !fs::is_directory(out))
        throw ConfigError("output path '" + out_dir + "' is not a directory");
    if (fs::exists(out) && !fs::is_empty(out) && !force)
        throw ConfigError("output directory '" + out_dir + "' is not empty (use --force)");
    fs::create_directories(out);

    ordered_json manifest;
    manifest["tool_version"] = kVersion;
    manifest["config_digest"] = grid.digest_hex;
    manifest["master_seed"] = grid.base.master_seed;
    manifest["threads"] = threads;
    const auto calib = OutcomeCalibration::standard();
    manifest["calibration"] = {{"sd_delta", calib.sd_delta},
                               {"sigma_week6", calib.sigma_week6},
                               {"sigma_baseline", calib.sigma_baseline},
                               {"rho", calib.rho}};
    auto& scen_list = manifest["scenarios"] = ordered_json::array();

    for (const auto& cfg : grid.scenarios) {
        const fs::path dir = out / cfg.scenario_id;
        fs::create_directories(dir);

        EngineOptions opts;
        std::ofstream events;
        if (verbose_events) {
            events.open(dir / "events.log", std::ios::trunc);
            opts.event_log = &events;
            opts.log_prefix = "scenario=" + cfg.scenario_id + " ";
        }
        const auto t0 = std::chrono::steady_clock::now();
        const auto run = run_scenario(cfg, threads, opts);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        ordered_json agg;
        agg["tool_version"] = kVersion;
        agg["config"] = ordered_json::parse(serialize_scenario(cfg));
        agg["oc"] = ordered_json::parse(serialize_oc(run.oc));
        agg["failures"] = run.failures;
        write_atomic(dir / "aggregate.json", agg.dump(2) + "\n");

        const auto [header, row] = flatten_aggregate(agg);
        write_atomic(dir / "aggregate.csv", join_csv(header) + join_csv(row));
        write_atomic(dir / "replicates.csv", replicates_csv(cfg, run));
        write_atomic(dir / "comparisons.csv", comparisons_csv(cfg, run));

        scen_list.push_back({{"id", cfg.scenario_id},
                             {"dir", cfg.scenario_id},
                             {"replicates", cfg.replicates},
                             {"failures", run.failures},
                             {"seconds", secs}});
        std::cerr << cfg.scenario_id << ": " << cfg.replicates << " replicates in " << fmt_num(secs)
                  << "s (" << run.failures << " failed)\n";
    }

    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out_file) {
    std::vector<ordered_json> aggs;
    for (const auto& d : dirs) {
        if (!fs::exists(d)) throw ConfigError("no such directory: '" + d + "'");
        for (const auto& entry : fs::recursive_directory_iterator(d)) {
            if (entry.is_regular_file() && entry.path().filename() == "aggregate.json")
                aggs.push_back(ordered_json::parse(read_file(entry.path())));
        }
    }
    if (aggs.empty()) throw ConfigError("no aggregate.json files found");

    std::string tool_version;
    for (const auto& a : aggs) {
        const auto v = a.at("tool_version").get<std::string>();
        if (tool_version.empty()) tool_version = v;
        else if (v != tool_version)
            std::cerr << "warning: mixed tool versions (" << tool_version << ", " << v << ")\n";
    }

    std::vector<std::string> header;
    std::string body;
    for (const auto& a : aggs) {
        auto [h, row] = flatten_aggregate(a);
        if (header.empty()) header = h;
        else if (h != header)
            throw std::runtime_error("incompatible aggregate schemas across scenarios");
        body += join_csv(row);
    }
    const std::string csv = join_csv(header) + body;
    if (out_file.empty()) std::cout << csv;
    else write_atomic(out_file, csv);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo evaluation of shared-control platform trial designs"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir, report_out;
    std::vector<std::string> report_dirs;
    std::optional<std::uint64_t> seed;
    std::optional<int> replicates;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    bool force = false, verbose_events = false;

    auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
    validate->add_option("config", config_path, "scenario file (JSON)")->required();

    auto* run = app.add_subcommand("run", "Run all scenarios and write results");
    run->add_option("config", config_path, "scenario file (JSON)")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--seed", seed, "override master_seed");
    run->add_option("--replicates", replicates, "override replicate count");
    run->add_option("--threads", threads, "worker threads");
    run->add_flag("--force", force, "allow writing into a non-empty output directory");
    run->add_flag("--verbose-events", verbose_events,
                  "write per-replicate event logs (forces single-threaded execution)");

    auto* report = app.add_subcommand("report", "Join aggregated results into one CSV table");
    report->add_option("dirs", report_dirs, "output directories to scan")->required();
    report->add_option("--out", report_out, "write the table to a file instead of stdout");

    try {
        app.parse(argc, argv);
        if (validate->parsed()) return cmd_validate(config_path);
        if (run->parsed())
            return cmd_run(config_path, out_dir, seed, replicates, threads, force, verbose_events);
        if (report->parsed()) return cmd_report(report_dirs, report_out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
