// egfl -- batch front end: design / analyze / simulate / sweep.
//
// Reads a JSON config, drives the shared library through its C API, and
// writes CSV/JSON artifacts plus a machine-readable status file and a run
// manifest that snapshots the resolved configuration.
//
// Exit codes: 0 all requested checks pass, 1 check failure, 2 invalid input,
// 3 numerical divergence.

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "egfl.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0, kExitCheck = 1, kExitInvalid = 2, kExitDiverged = 3;

struct Options {
    std::string command;
    std::string config_path;
    std::string out_dir;
    int grid_points = 2000;
    bool seedless = false;
    std::string sweep_param;
    std::vector<double> sweep_values;
};

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        os << content;
    }
    fs::rename(tmp, path);
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Sets a dotted scalar path ("design.omega_theta_rad_per_s",
// "scenario.grid.events.0.fraction") in a JSON tree; integer components index
// arrays.
void set_path(json& j, const std::string& path, double value) {
    json* node = &j;
    size_t pos = 0;
    while (true) {
        size_t dot = path.find('.', pos);
        std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
        bool is_index = !key.empty() && key.find_first_not_of("0123456789") == std::string::npos;
        if (dot == std::string::npos) {
            json& leaf = is_index && node->is_array() ? (*node)[std::stoul(key)] : (*node)[key];
            if (!leaf.is_null() && !leaf.is_number())
                throw std::runtime_error("sweep parameter does not address a scalar: " + path);
            leaf = value;
            return;
        }
        if (is_index && node->is_array()) {
            size_t idx = std::stoul(key);
            if (idx >= node->size()) throw std::runtime_error("sweep index out of range: " + path);
            node = &(*node)[idx];
        } else {
            if (!node->contains(key)) (*node)[key] = json::object();
            node = &(*node)[key];
        }
        pos = dot + 1;
    }
}

json manifest_base(const Options& opt, const json& config_snapshot) {
    json m;
    m["tool"] = "egfl";
    m["version"] = egfl_version();
    m["command"] = opt.command;
    m["config_path"] = opt.config_path;
    m["grid_points"] = opt.grid_points;
    m["seedless"] = opt.seedless;
    m["config_snapshot"] = config_snapshot;
    return m;
}

void finish(const Options& opt, json manifest, json status, int exit_code,
            std::chrono::steady_clock::time_point t0) {
    if (!opt.seedless) {
        auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0);
        manifest["wall_ms"] = dt.count();
    }
    status["exit_code"] = exit_code;
    write_atomic(fs::path(opt.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    write_atomic(fs::path(opt.out_dir) / "status.json", status.dump(2) + "\n");
}

std::string take_string(egfl_status rc, char* s) {
    if (rc != EGFL_OK || !s) throw std::runtime_error(egfl_last_error());
    std::string out(s);
    egfl_string_free(s);
    return out;
}

// --- per-run simulation with metrics ----------------------------------------

struct SimRun {
    int status = kExitOk;
    std::string message;
    json metrics;
};

SimRun simulate_one(const std::string& config_text, const fs::path& out_dir) {
    SimRun run;
    fs::create_directories(out_dir);

    egfl_scenario* sc = nullptr;
    egfl_status rc = egfl_scenario_create(config_text.c_str(), &sc);
    if (rc != EGFL_OK) {
        run.status = kExitInvalid;
        run.message = egfl_last_error();
        return run;
    }
    egfl_trace* tr = nullptr;
    rc = egfl_simulate(sc, &tr);
    bool diverged = rc == EGFL_ERR_DIVERGED;
    if (rc != EGFL_OK && !diverged) {
        run.status = kExitInvalid;
        run.message = egfl_last_error();
        egfl_scenario_destroy(sc);
        return run;
    }

    fs::path tmp = out_dir / "trace.csv.tmp";
    egfl_trace_write_csv(tr, tmp.string().c_str());
    fs::rename(tmp, out_dir / "trace.csv");

    json cfg = json::parse(config_text);
    json m;
    m["diverged"] = diverged;
    m["saturation_count"] = egfl_trace_saturation_count(tr);
    long rows = egfl_trace_rows(tr);
    double fsamp = cfg["inverter"]["fs_hz"].get<double>();
    m["rows"] = rows;

    // transient metrics around the first grid event, when one exists
    double t_event = -1.0;
    if (cfg.contains("scenario") && cfg["scenario"]["grid"].contains("events"))
        for (const auto& e : cfg["scenario"]["grid"]["events"])
            if (e.contains("t_s") && e["t_s"].get<double>() > 0.0) {
                double te = e["t_s"].get<double>();
                if (t_event < 0.0 || te < t_event) t_event = te;
            }
    if (!diverged && t_event > 0.0 && t_event * fsamp + 16 < rows) {
        for (const char* ch : {"dw", "vc_q", "ig_d"}) {
            char* s = nullptr;
            if (egfl_trace_transient(tr, ch, t_event, &s) == EGFL_OK)
                m["transient"][ch] = json::parse(take_string(EGFL_OK, s));
        }
        // peak |vc_q| after the event
        const double* vcq = nullptr;
        long len = 0;
        if (egfl_trace_column(tr, "vc_q", &vcq, &len) == EGFL_OK) {
            double peak = 0.0;
            for (long i = long(t_event * fsamp); i < len; ++i)
                peak = std::max(peak, std::abs(vcq[i]));
            m["vcq_peak_V"] = peak;
        }
    }
    // steady-state harmonics of the line current over the last 10 cycles
    if (!diverged) {
        double w0 = cfg["line"]["omega0_rad_per_s"].get<double>();
        double t_start = (rows - 1) / fsamp - 10.0 * 2.0 * M_PI / w0;
        if (t_start > 0.0) {
            for (const char* ch : {"ig_d", "ig_q"}) {
                char* s = nullptr;
                if (egfl_trace_harmonics(tr, ch, w0, t_start, 10, &s) == EGFL_OK)
                    m["harmonics"][ch] = json::parse(take_string(EGFL_OK, s));
            }
        }
    }
    run.metrics = m;
    if (diverged) {
        run.status = kExitDiverged;
        run.message = egfl_last_error();
    }
    write_atomic(out_dir / "metrics.json", m.dump(2) + "\n");
    egfl_trace_destroy(tr);
    egfl_scenario_destroy(sc);
    return run;
}

// --- commands ----------------------------------------------------------------

int cmd_design(const Options& opt, const std::string& config_text, json& status, json& manifest) {
    egfl_design* d = nullptr;
    if (egfl_design_create(config_text.c_str(), &d) != EGFL_OK) {
        status["error"] = egfl_last_error();
        return kExitInvalid;
    }
    char* rep = nullptr;
    std::string report = take_string(egfl_design_report(d, &rep), rep);
    write_atomic(fs::path(opt.out_dir) / "design_report.json", report + "\n");
    int sync_ok = 0;
    egfl_design_sync_ok(d, &sync_ok);
    egfl_design_destroy(d);
    status["checks"]["synchronization"] = sync_ok == 1;
    manifest["outputs"] = {"design_report.json"};
    return sync_ok ? kExitOk : kExitCheck;
}

int cmd_analyze(const Options& opt, const std::string& config_text, json& status, json& manifest) {
    json cfg = json::parse(config_text);
    egfl_analysis* a = nullptr;
    if (egfl_analysis_run(config_text.c_str(), opt.grid_points, 0ULL, &a) != EGFL_OK) {
        status["error"] = egfl_last_error();
        return kExitInvalid;
    }
    fs::path csv = fs::path(opt.out_dir) / "analysis.csv";
    fs::path tmp = csv;
    tmp += ".tmp";
    egfl_analysis_write_csv(a, tmp.string().c_str());
    fs::rename(tmp, csv);

    char* s = nullptr;
    std::string summary = take_string(egfl_analysis_summary(a, &s), s);
    write_atomic(fs::path(opt.out_dir) / "analysis_summary.json", summary + "\n");
    json js = json::parse(summary);

    // loop metrics as a small CSV for plotting
    std::ostringstream lm;
    lm << "axis,ms,ms_omega_rad_per_s,pm_deg,gm,crossover_rad_per_s,omega_b_rad_per_s,"
          "omega_t_rad_per_s,pm_bound_from_ms_deg,gm_bound_from_ms\n";
    for (const char* ax : {"loop_d", "loop_q", "loop_theta"}) {
        const auto& l = js[ax];
        char row[512];
        std::snprintf(row, sizeof(row), "%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      ax + 5, l["ms"].get<double>(), l["ms_omega_rad_per_s"].get<double>(),
                      l["pm_deg"].get<double>(), l["gm"].get<double>(),
                      l["crossover_rad_per_s"].get<double>(), l["omega_b_rad_per_s"].get<double>(),
                      l["omega_t_rad_per_s"].get<double>(), l["pm_bound_from_ms_deg"].get<double>(),
                      l["gm_bound_from_ms"].get<double>());
        lm << row;
    }
    write_atomic(fs::path(opt.out_dir) / "loop_metrics.csv", lm.str());

    int nominal = 0, rs = 0, bode = 0;
    egfl_analysis_verdicts(a, &nominal, &rs, &bode);
    egfl_analysis_destroy(a);

    bool rs_requested = cfg.contains("uncertainty");
    status["checks"]["nominal_stability"] = nominal == 1;
    status["checks"]["bode_audit"] = bode == 1;
    if (rs_requested) status["checks"]["robust_stability"] = rs == 1;
    manifest["outputs"] = {"analysis.csv", "analysis_summary.json", "loop_metrics.csv"};
    bool all = nominal == 1 && bode == 1 && (!rs_requested || rs == 1);
    return all ? kExitOk : kExitCheck;
}

int cmd_simulate(const Options& opt, const std::string& config_text, json& status, json& manifest) {
    SimRun run = simulate_one(config_text, opt.out_dir);
    if (!run.message.empty()) status["error"] = run.message;
    status["checks"]["completed"] = run.status == kExitOk;
    if (!run.metrics.is_null()) status["metrics"] = run.metrics;
    manifest["outputs"] = {"trace.csv", "metrics.json"};
    return run.status;
}

int cmd_sweep(const Options& opt, const std::string& config_text, json& status, json& manifest) {
    json base = json::parse(config_text);
    std::string param = opt.sweep_param;
    std::vector<double> values = opt.sweep_values;
    if (param.empty() && base.contains("sweep")) {
        param = base["sweep"].value("parameter", "");
        if (base["sweep"].contains("values"))
            values = base["sweep"]["values"].get<std::vector<double>>();
    }
    base.erase("sweep");
    if (param.empty() || values.empty()) {
        status["error"] = "sweep requires a parameter path and a non-empty value list";
        return kExitInvalid;
    }

    int max_threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EGFL_THREADS")) max_threads = std::max(1, std::atoi(env));
    max_threads = std::min<int>(max_threads, static_cast<int>(values.size()));

    std::vector<SimRun> runs(values.size());
    std::vector<json> configs(values.size());
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::mutex err_mtx;
    std::string first_error;
    for (int t = 0; t < max_threads; ++t) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1)) {
                try {
                    json cfg = base;
                    set_path(cfg, param, values[i]);
                    configs[i] = cfg;
                    runs[i] = simulate_one(cfg.dump(),
                                           fs::path(opt.out_dir) / ("run_" + std::to_string(i)));
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mtx);
                    if (first_error.empty()) first_error = e.what();
                    runs[i].status = kExitInvalid;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (!first_error.empty()) status["error"] = first_error;

    // aggregate table
    std::ostringstream agg;
    agg << "value,run_dir,status,saturation_count,dw_settle_s,dw_rocof_max,dw_extremum,"
           "vcq_peak_V\n";
    int worst = kExitOk;
    for (size_t i = 0; i < values.size(); ++i) {
        const json& m = runs[i].metrics;
        auto tget = [&](const char* f) -> std::string {
            if (m.contains("transient") && m["transient"].contains("dw"))
                return std::to_string(m["transient"]["dw"].value(f, 0.0));
            return "";
        };
        char head[128];
        std::snprintf(head, sizeof(head), "%.9g,run_%zu,%d,%ld,", values[i], i, runs[i].status,
                      static_cast<long>(m.value("saturation_count", 0L)));
        agg << head << tget("settle_time_s") << "," << tget("rocof_max") << "," << tget("extremum")
            << ","
            << (m.contains("vcq_peak_V") ? std::to_string(m["vcq_peak_V"].get<double>()) : "")
            << "\n";
        worst = std::max(worst, runs[i].status);
    }
    write_atomic(fs::path(opt.out_dir) / "sweep_summary.csv", agg.str());
    status["checks"]["all_runs_completed"] = worst == kExitOk;
    json snap = json::array();
    for (auto& c : configs) snap.push_back(c);
    manifest["runs"] = snap;
    manifest["outputs"] = {"sweep_summary.csv"};
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"egfl: grid-following inverter control design, analysis, and simulation"};
    app.require_subcommand(1);
    Options opt;

    std::string values_csv;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON config file")->required();
        sub->add_option("--out", opt.out_dir, "output directory")->required();
        sub->add_option("--grid-points", opt.grid_points, "frequency grid points (default 2000)");
        sub->add_flag("--seedless", opt.seedless,
                      "omit volatile metadata so reruns are byte-identical");
    };
    CLI::App* design = app.add_subcommand("design", "synthesize controllers and report margins");
    CLI::App* analyze = app.add_subcommand("analyze", "frequency-domain verdicts and curves");
    CLI::App* simulate = app.add_subcommand("simulate", "run a time-domain scenario");
    CLI::App* sweep = app.add_subcommand("sweep", "repeat a scenario over a parameter list");
    for (CLI::App* sub : {design, analyze, simulate, sweep}) add_common(sub);
    sweep->add_option("--param", opt.sweep_param, "dotted config path of the swept scalar");
    sweep->add_option("--values", values_csv, "comma-separated value list");

    CLI11_PARSE(app, argc, argv);
    opt.command = app.get_subcommands().front()->get_name();
    if (!values_csv.empty()) {
        std::stringstream ss(values_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) opt.sweep_values.push_back(std::stod(tok));
    }

    auto t0 = std::chrono::steady_clock::now();
    json status;
    status["command"] = opt.command;
    int code = kExitInvalid;
    try {
        fs::create_directories(opt.out_dir);
        std::string config_text = slurp(opt.config_path);
        json snapshot = json::parse(config_text);
        json manifest = manifest_base(opt, snapshot);

        if (opt.command == "design")
            code = cmd_design(opt, config_text, status, manifest);
        else if (opt.command == "analyze")
            code = cmd_analyze(opt, config_text, status, manifest);
        else if (opt.command == "simulate")
            code = cmd_simulate(opt, config_text, status, manifest);
        else if (opt.command == "sweep")
            code = cmd_sweep(opt, config_text, status, manifest);

        finish(opt, manifest, status, code, t0);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "egfl: %s\n", e.what());
        try {
            fs::create_directories(opt.out_dir);
            status["error"] = e.what();
            finish(opt, manifest_base(opt, json::object()), status, kExitInvalid, t0);
        } catch (...) {
        }
        return kExitInvalid;
    }
    if (code != kExitOk)
        std::fprintf(stderr, "egfl: %s finished with exit code %d\n", opt.command.c_str(), code);
    return code;
}
