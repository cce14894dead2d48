#include "egfl/config.hpp"

#include <json.hpp>

#include "egfl/error.hpp"

namespace egfl {

using nlohmann::json;

namespace {

double need(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        fail(Errc::invalid_argument, std::string("config: missing or non-numeric field '") + key + "'");
    return j[key].get<double>();
}

double get_or(const json& j, const char* key, double dflt) {
    return (j.contains(key) && j[key].is_number()) ? j[key].get<double>() : dflt;
}

LineParams parse_line(const json& j) {
    return LineParams::make(need(j, "L_henry"), need(j, "R_ohm"), need(j, "omega0_rad_per_s"));
}

InverterParams parse_inverter(const json& j) {
    InverterParams p;
    p.Li = need(j, "Li_henry");
    p.Ci = need(j, "Ci_farad");
    p.Ri = need(j, "Ri_ohm");
    p.vdc = need(j, "vdc_volt");
    p.fs = need(j, "fs_hz");
    p.fsw = get_or(j, "fsw_hz", p.fs);
    p.v0 = need(j, "v0_volt");
    int ph = static_cast<int>(get_or(j, "phases", 3));
    if (ph != 1 && ph != 3) fail(Errc::invalid_argument, "config: phases must be 1 or 3");
    p.phases = (ph == 3) ? Phases::three : Phases::single;
    p.validate();
    return p;
}

DesignParams parse_design(const json& j) {
    DesignParams d;
    d.alpha_d = need(j, "alpha_d");
    d.omega_d = need(j, "omega_d_rad_per_s");
    d.alpha_q = need(j, "alpha_q");
    d.omega_q = need(j, "omega_q_rad_per_s");
    d.alpha_theta = need(j, "alpha_theta");
    d.omega_theta = need(j, "omega_theta_rad_per_s");
    d.validate();
    return d;
}

std::vector<AuxCompensator> parse_aux(const json& j) {
    std::vector<AuxCompensator> out;
    if (!j.is_array()) fail(Errc::invalid_argument, "config: 'aux' must be an array");
    for (const auto& a : j) {
        AuxCompensator c;
        std::string kind = a.value("kind", "");
        if (kind == "pr") {
            c.kind = AuxKind::pr;
            c.gain = need(a, "gain");
            c.damping = need(a, "damping");
            c.order = static_cast<int>(get_or(a, "order", 2));
        } else if (kind == "lead") {
            c.kind = AuxKind::lead;
            c.alpha = need(a, "alpha");
            c.omega_r = need(a, "omega_r_rad_per_s");
        } else if (kind == "notch") {
            c.kind = AuxKind::notch;
            c.omega_n = need(a, "omega_n_rad_per_s");
            c.xi_n = get_or(a, "damping", 0.7);
        } else {
            fail(Errc::invalid_argument, "config: aux kind must be pr, lead, or notch");
        }
        out.push_back(c);
    }
    return out;
}

GridModel parse_grid(const json& j) {
    GridModel g;
    g.v_mag = need(j, "v_mag_volt");
    if (j.contains("events")) {
        for (const auto& e : j["events"]) {
            GridEvent ev;
            ev.t = get_or(e, "t_s", 0.0);
            std::string kind = e.value("kind", "");
            if (kind == "freq_step") {
                ev.kind = GridEventKind::freq_step;
                ev.freq_step = need(e, "delta_omega_rad_per_s");
            } else if (kind == "phase_jump") {
                ev.kind = GridEventKind::phase_jump;
                ev.phase_jump = need(e, "phase_rad");
            } else if (kind == "sag") {
                ev.kind = GridEventKind::sag;
                ev.sag_fraction = need(e, "fraction");
            } else if (kind == "harmonic") {
                ev.kind = GridEventKind::harmonic;
                ev.order = need(e, "order");
                ev.fraction = need(e, "fraction");
                ev.phase = get_or(e, "phase_rad", 0.0);
            } else if (kind == "asymmetry") {
                ev.kind = GridEventKind::asymmetry;
                ev.a = need(e, "a");
                ev.b = need(e, "b");
                ev.psi = get_or(e, "psi_rad", 0.0);
                ev.vg0 = get_or(e, "vg0_volt", 0.0);
            } else {
                fail(Errc::invalid_argument, "config: unknown grid event kind '" + kind + "'");
            }
            g.events.push_back(ev);
        }
    }
    g.validate();
    return g;
}

}  // namespace

LineParams Config::design_line() const {
    if (use_nominal_design) {
        if (!box) fail(Errc::invalid_argument, "config: use_nominal_design requires 'uncertainty'");
        return nominal_plant(*box, line.omega0).line;
    }
    return line;
}

ScenarioConfig Config::resolved_scenario() const {
    if (!scenario) fail(Errc::invalid_argument, "config: missing 'scenario' section");
    ScenarioConfig sc = *scenario;
    sc.line = line;
    sc.inverter = inverter;
    sc.design = design;
    sc.aux = aux;
    sc.tau_i = tau_i;
    if (use_nominal_design) sc.design_line = design_line();
    return sc;
}

Config parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        fail(Errc::invalid_argument, std::string("config: JSON parse error: ") + e.what());
    }
    if (!j.contains("line") || !j.contains("inverter") || !j.contains("design"))
        fail(Errc::invalid_argument, "config: 'line', 'inverter', and 'design' sections are required");

    Config c;
    c.line = parse_line(j["line"]);
    c.inverter = parse_inverter(j["inverter"]);
    c.design = parse_design(j["design"]);
    if (j.contains("aux")) c.aux = parse_aux(j["aux"]);
    c.tau_i = get_or(j, "tau_i_s", 1e-4);
    if (!(c.tau_i > 0.0)) fail(Errc::invalid_argument, "config: tau_i_s must be positive");

    if (j.contains("uncertainty")) {
        const auto& u = j["uncertainty"];
        c.box = UncertaintyBox::make(need(u, "Lmin_henry"), need(u, "Lmax_henry"), need(u, "Rmin_ohm"),
                                     need(u, "Rmax_ohm"));
        c.omega_bw = get_or(u, "omega_bw_rad_per_s", 0.0);
        c.use_nominal_design = u.value("use_nominal_design", false);
    }
    if (c.omega_bw == 0.0) c.omega_bw = c.design.omega_d;

    if (j.contains("scenario")) {
        const auto& s = j["scenario"];
        ScenarioConfig sc;
        sc.duration = need(s, "duration_s");
        sc.substeps = static_cast<int>(get_or(s, "substeps", 10));
        sc.delay_enabled = s.value("delay_enabled", true);
        sc.P0 = get_or(s, "p0_watt", 0.0);
        sc.Q0 = get_or(s, "q0_var", 0.0);
        if (s.contains("setpoint_steps")) {
            for (const auto& st : s["setpoint_steps"]) {
                SetpointStep step;
                step.t = need(st, "t_s");
                step.P0 = get_or(st, "p0_watt", sc.P0);
                step.Q0 = get_or(st, "q0_var", sc.Q0);
                sc.setpoint_steps.push_back(step);
            }
        }
        if (!s.contains("grid")) fail(Errc::invalid_argument, "config: scenario needs a 'grid' section");
        sc.grid = parse_grid(s["grid"]);
        if (s.contains("probe")) {
            const auto& p = s["probe"];
            Probe pr;
            std::string ax = p.value("axis", "d");
            pr.axis = (ax == "q") ? Axis::q : Axis::d;
            pr.amplitude = need(p, "amplitude_ampere");
            pr.omega = need(p, "omega_rad_per_s");
            pr.t_start = get_or(p, "t_start_s", 0.0);
            sc.probe = pr;
        }
        c.scenario = sc;
    }
    return c;
}

}  // namespace egfl
