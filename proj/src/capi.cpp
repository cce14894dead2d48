#include "egfl.h"

#include <cstring>
#include <fstream>
#include <json.hpp>
#include <string>

#include "egfl/analysis.hpp"
#include "egfl/config.hpp"
#include "egfl/error.hpp"
#include "egfl/sim.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

egfl_status to_status(const egfl::Error& e) {
    switch (e.code()) {
        case egfl::Errc::check_failed: return EGFL_ERR_CHECK;
        case egfl::Errc::invalid_argument: return EGFL_ERR_INVALID;
        case egfl::Errc::divergence: return EGFL_ERR_DIVERGED;
        case egfl::Errc::numeric: return EGFL_ERR_NUMERIC;
    }
    return EGFL_ERR_NUMERIC;
}

template <typename F>
egfl_status guarded(F&& f) {
    try {
        return f();
    } catch (const egfl::Error& e) {
        g_last_error = e.what();
        return to_status(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EGFL_ERR_NUMERIC;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct egfl_design {
    egfl::Config cfg;
    egfl::ControllerSet set;
    egfl::SyncVerdict sync;
};

struct egfl_analysis {
    egfl::AnalysisBundle bundle;
};

struct egfl_scenario {
    egfl::ScenarioConfig cfg;
};

struct egfl_trace {
    egfl::SimResult result;
    double omega0 = 0.0;
};

extern "C" {

const char* egfl_version(void) { return "1.0.0"; }

const char* egfl_last_error(void) { return g_last_error.c_str(); }

void egfl_string_free(char* s) { delete[] s; }

/* --- design ------------------------------------------------------------ */

egfl_status egfl_design_create(const char* config_json, egfl_design** out) {
    if (!config_json || !out) {
        g_last_error = "null argument";
        return EGFL_ERR_INVALID;
    }
    return guarded([&] {
        auto d = std::make_unique<egfl_design>();
        d->cfg = egfl::parse_config(config_json);
        d->set = egfl::build_controller_set(d->cfg.design_line(), d->cfg.design, d->cfg.aux);
        d->sync = egfl::check_synchronization(d->set);
        *out = d.release();
        return EGFL_OK;
    });
}

void egfl_design_destroy(egfl_design* d) { delete d; }

egfl_status egfl_design_report(const egfl_design* d, char** json_out) {
    if (!d || !json_out) return EGFL_ERR_INVALID;
    return guarded([&] {
        *json_out = dup_string(egfl::design_report_json(d->cfg));
        return EGFL_OK;
    });
}

egfl_status egfl_design_sync_ok(const egfl_design* d, int* ok) {
    if (!d || !ok) return EGFL_ERR_INVALID;
    *ok = d->sync.pass ? 1 : 0;
    return EGFL_OK;
}

egfl_status egfl_design_predicted_pm(const egfl_design* d, char axis, double* pm_deg, int* in_range) {
    if (!d || !pm_deg || (axis != 'd' && axis != 'q')) return EGFL_ERR_INVALID;
    return guarded([&] {
        auto pm = egfl::predicted_pm(d->cfg.design, d->cfg.design_line(),
                                     axis == 'd' ? egfl::Axis::d : egfl::Axis::q);
        *pm_deg = pm.pm_deg;
        if (in_range) *in_range = pm.in_validity_range ? 1 : 0;
        return EGFL_OK;
    });
}

/* --- analysis ----------------------------------------------------------- */

egfl_status egfl_analysis_run(const char* config_json, int grid_points, unsigned long long seed,
                              egfl_analysis** out) {
    if (!config_json || !out) return EGFL_ERR_INVALID;
    return guarded([&] {
        egfl::Config cfg = egfl::parse_config(config_json);
        egfl::AnalysisOptions opt;
        if (grid_points > 1) opt.grid_points = grid_points;
        if (seed) opt.seed = seed;
        auto a = std::make_unique<egfl_analysis>();
        a->bundle = egfl::run_analysis(cfg, opt);
        *out = a.release();
        return EGFL_OK;
    });
}

void egfl_analysis_destroy(egfl_analysis* a) { delete a; }

egfl_status egfl_analysis_summary(const egfl_analysis* a, char** json_out) {
    if (!a || !json_out) return EGFL_ERR_INVALID;
    return guarded([&] {
        *json_out = dup_string(a->bundle.summary_json());
        return EGFL_OK;
    });
}

egfl_status egfl_analysis_write_csv(const egfl_analysis* a, const char* path) {
    if (!a || !path) return EGFL_ERR_INVALID;
    return guarded([&] {
        std::ofstream os(path);
        if (!os) {
            g_last_error = std::string("cannot open ") + path;
            return EGFL_ERR_INVALID;
        }
        a->bundle.write_csv(os);
        return EGFL_OK;
    });
}

egfl_status egfl_analysis_verdicts(const egfl_analysis* a, int* nominal_ok, int* rs_ok, int* bode_ok) {
    if (!a) return EGFL_ERR_INVALID;
    if (nominal_ok) *nominal_ok = a->bundle.nominal.pass ? 1 : 0;
    if (rs_ok) *rs_ok = a->bundle.rs ? (a->bundle.rs->pass ? 1 : 0) : -1;
    if (bode_ok) *bode_ok = (a->bundle.bode_d.pass && a->bundle.bode_q.pass) ? 1 : 0;
    return EGFL_OK;
}

/* --- simulation ---------------------------------------------------------- */

egfl_status egfl_scenario_create(const char* config_json, egfl_scenario** out) {
    if (!config_json || !out) return EGFL_ERR_INVALID;
    return guarded([&] {
        egfl::Config cfg = egfl::parse_config(config_json);
        auto s = std::make_unique<egfl_scenario>();
        s->cfg = cfg.resolved_scenario();
        s->cfg.validate();
        *out = s.release();
        return EGFL_OK;
    });
}

void egfl_scenario_destroy(egfl_scenario* s) { delete s; }

egfl_status egfl_simulate(const egfl_scenario* s, egfl_trace** out) {
    if (!s || !out) return EGFL_ERR_INVALID;
    return guarded([&] {
        auto t = std::make_unique<egfl_trace>(egfl_trace{egfl::run_scenario(s->cfg), s->cfg.line.omega0});
        bool diverged = t->result.status == egfl::SimStatus::diverged;
        if (diverged) g_last_error = t->result.message;
        *out = t.release();
        return diverged ? EGFL_ERR_DIVERGED : EGFL_OK;
    });
}

void egfl_trace_destroy(egfl_trace* t) { delete t; }

long egfl_trace_rows(const egfl_trace* t) { return t ? static_cast<long>(t->result.trace.rows()) : 0; }

int egfl_trace_cols(const egfl_trace* t) { return t ? egfl::SimTrace::kCols : 0; }

const char* egfl_trace_col_name(const egfl_trace* t, int i) {
    if (!t || i < 0 || i >= egfl::SimTrace::kCols) return nullptr;
    return egfl::SimTrace::kNames[i];
}

egfl_status egfl_trace_column(const egfl_trace* t, const char* channel, const double** data,
                              long* len) {
    if (!t || !channel || !data) return EGFL_ERR_INVALID;
    return guarded([&] {
        const auto& col = t->result.trace.column(channel);
        *data = col.data();
        if (len) *len = static_cast<long>(col.size());
        return EGFL_OK;
    });
}

egfl_status egfl_trace_write_csv(const egfl_trace* t, const char* path) {
    if (!t || !path) return EGFL_ERR_INVALID;
    return guarded([&] {
        std::ofstream os(path);
        if (!os) {
            g_last_error = std::string("cannot open ") + path;
            return EGFL_ERR_INVALID;
        }
        t->result.trace.write_csv(os);
        return EGFL_OK;
    });
}

int egfl_trace_diverged(const egfl_trace* t) {
    return (t && t->result.status == egfl::SimStatus::diverged) ? 1 : 0;
}

long egfl_trace_saturation_count(const egfl_trace* t) {
    return t ? t->result.saturation_count : 0;
}

egfl_status egfl_trace_harmonics(const egfl_trace* t, const char* channel, double omega0,
                                 double t_start, int cycles, char** json_out) {
    if (!t || !channel || !json_out) return EGFL_ERR_INVALID;
    return guarded([&] {
        double w0 = omega0 > 0.0 ? omega0 : t->omega0;
        auto rep = egfl::measure_harmonics(t->result.trace, channel, w0, t_start, cycles);
        json j;
        j["window_start_s"] = rep.window_start;
        j["window_seconds"] = rep.window_seconds;
        j["thd"] = rep.thd;
        json mags = json::object();
        for (int n = 1; n <= 13; ++n) mags[std::to_string(n)] = rep.magnitude[n];
        j["magnitude"] = mags;
        *json_out = dup_string(j.dump(2));
        return EGFL_OK;
    });
}

egfl_status egfl_trace_transient(const egfl_trace* t, const char* channel, double t_event,
                                 char** json_out) {
    if (!t || !channel || !json_out) return EGFL_ERR_INVALID;
    return guarded([&] {
        auto m = egfl::transient_metrics(t->result.trace, channel, t_event);
        json j{{"valid", m.valid},
               {"step_size", m.step_size},
               {"rocof_max", m.rocof_max},
               {"extremum", m.extremum},
               {"settle_time_s", m.settle_time},
               {"overshoot", m.overshoot},
               {"final_value", m.final_value}};
        *json_out = dup_string(j.dump(2));
        return EGFL_OK;
    });
}

egfl_status egfl_trace_tone(const egfl_trace* t, const char* channel, double omega, double t_start,
                            int periods, double* amplitude) {
    if (!t || !channel || !amplitude) return EGFL_ERR_INVALID;
    return guarded([&] {
        *amplitude = egfl::measure_tone(t->result.trace, channel, omega, t_start, periods);
        return EGFL_OK;
    });
}

egfl_status egfl_trace_band_rms(const egfl_trace* t, const char* channel, double omega0,
                                double t_start, int cycles, double w_lo, double w_hi, double* rms) {
    if (!t || !channel || !rms) return EGFL_ERR_INVALID;
    return guarded([&] {
        double w0 = omega0 > 0.0 ? omega0 : t->omega0;
        *rms = egfl::band_rms(t->result.trace, channel, w0, t_start, cycles, w_lo, w_hi);
        return EGFL_OK;
    });
}

} /* extern "C" */
