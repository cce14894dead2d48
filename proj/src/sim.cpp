#include "egfl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>

#include "egfl/error.hpp"
#include "egfl/loop.hpp"

namespace egfl {

namespace {
constexpr double k2pi3 = 2.0 * M_PI / 3.0;
constexpr double k4pi3 = 4.0 * M_PI / 3.0;
}

void GridModel::validate() const {
    if (!(v_mag > 0.0)) fail(Errc::invalid_argument, "GridModel: v_mag must be positive");
    for (const auto& e : events) {
        if (e.t < 0.0) fail(Errc::invalid_argument, "GridModel: event times must be >= 0");
        if (e.kind == GridEventKind::sag && !(e.sag_fraction > 0.0 && e.sag_fraction <= 1.0))
            fail(Errc::invalid_argument, "GridModel: sag fraction must be in (0, 1]");
        if (e.kind == GridEventKind::harmonic && (e.fraction < 0.0 || !(e.order > 1.0)))
            fail(Errc::invalid_argument, "GridModel: harmonic needs order > 1 and fraction >= 0");
        if (e.kind == GridEventKind::asymmetry && (e.a < 0.0 || e.b < 0.0))
            fail(Errc::invalid_argument, "GridModel: asymmetry amplitudes must be >= 0");
    }
}

double grid_angle(double t, const GridModel& grid, double omega0) {
    double theta = omega0 * t;
    for (const auto& e : grid.events) {
        if (t < e.t) continue;
        if (e.kind == GridEventKind::freq_step) theta += e.freq_step * (t - e.t);
        if (e.kind == GridEventKind::phase_jump) theta += e.phase_jump;
    }
    return theta;
}

AbcSample grid_voltage(double t, const GridModel& grid, double omega0, Phases phases) {
    double theta_g = grid_angle(t, grid, omega0);
    double vmag = grid.v_mag;
    double a_amp = 1.0, b_amp = 0.0, psi = 0.0, vg0 = 0.0;
    for (const auto& e : grid.events) {
        if (t < e.t) continue;
        if (e.kind == GridEventKind::sag) vmag = grid.v_mag * e.sag_fraction;
        if (e.kind == GridEventKind::asymmetry) {
            a_amp = e.a;
            b_amp = e.b;
            psi = e.psi;
            vg0 = e.vg0;
        }
    }

    // positive sequence + negative sequence + zero sequence
    double pa = theta_g, na = theta_g + psi;
    AbcSample v;
    if (phases == Phases::three) {
        v.a = a_amp * vmag * std::cos(pa) + b_amp * vmag * std::cos(na) + vg0;
        v.b = a_amp * vmag * std::cos(pa - k2pi3) + b_amp * vmag * std::cos(na - k4pi3) + vg0;
        v.c = a_amp * vmag * std::cos(pa - k4pi3) + b_amp * vmag * std::cos(na - k2pi3) + vg0;
    } else {
        // Synthesized quadrature pair: alpha in .a, beta in .b (exact -90 deg
        // copy of every component).
        v.a = a_amp * vmag * std::cos(pa) + b_amp * vmag * std::cos(na) + vg0;
        v.b = a_amp * vmag * std::sin(pa) - b_amp * vmag * std::sin(na);
        v.c = 0.0;
    }

    // Scheduled harmonics, realized as negative-sequence components at
    // (order-1)*w_g so they land at order*w_g in the rotating frame.
    for (const auto& e : grid.events) {
        if (t < e.t || e.kind != GridEventKind::harmonic || e.fraction == 0.0) continue;
        double chi = (e.order - 1.0) * theta_g + e.phase;
        double amp = e.fraction * vmag;
        if (phases == Phases::three) {
            v.a += amp * std::cos(chi);
            v.b += amp * std::cos(chi - k4pi3);
            v.c += amp * std::cos(chi - k2pi3);
        } else {
            v.a += amp * std::cos(chi);
            v.b += -amp * std::sin(chi);
        }
    }
    return v;
}

void abc_to_dq(double a, double b, double c, double theta, double& d, double& q) {
    double alpha = (2.0 * a - b - c) / 3.0;
    double beta = (b - c) / std::sqrt(3.0);
    double ct = std::cos(theta), st = std::sin(theta);
    d = ct * alpha + st * beta;
    q = -st * alpha + ct * beta;
}

void dq_to_abc(double d, double q, double theta, double& a, double& b, double& c) {
    double ct = std::cos(theta), st = std::sin(theta);
    double alpha = ct * d - st * q;
    double beta = st * d + ct * q;
    a = alpha;
    b = -0.5 * alpha + 0.5 * std::sqrt(3.0) * beta;
    c = -0.5 * alpha - 0.5 * std::sqrt(3.0) * beta;
}

bool power_to_current(double P0, double Q0, double vd, double vq, Phases phases, double v_floor,
                      double& i0d, double& i0q) {
    double n2 = vd * vd + vq * vq;
    if (n2 < v_floor * v_floor) return false;
    double phi = (phases == Phases::three) ? (2.0 / 3.0) : 1.0;
    i0d = phi * (vd * P0 + vq * Q0) / n2;
    i0q = phi * (vq * P0 - vd * Q0) / n2;
    return true;
}

void ScenarioConfig::validate() const {
    inverter.validate();
    design.validate();
    grid.validate();
    if (!(duration > 0.0)) fail(Errc::invalid_argument, "ScenarioConfig: duration must be positive");
    if (substeps < 1) fail(Errc::invalid_argument, "ScenarioConfig: substeps must be >= 1");
    if (!(tau_i > 0.0)) fail(Errc::invalid_argument, "ScenarioConfig: tau_i must be positive");
}

// ---------------------------------------------------------------------------

const char* const SimTrace::kNames[SimTrace::kCols] = {
    "t_s",      "iga_d_A",    "ig_q_A",  "vc_d_V", "vc_q_V", "iL_d_A",
    "iL_q_A",   "theta_rad",  "dw_rad_per_s", "u_theta_V", "vq_V", "e_d_A",
    "e_q_A",    "vg_a_V",     "vg_b_V",  "vg_c_V", "i0_d_A", "i0_q_A"};

int SimTrace::column_index(const std::string& name) {
    for (int i = 0; i < kCols; ++i)
        if (name == kNames[i]) return i;
    // short aliases without units
    static const char* const alias[kCols] = {"t",  "ig_d", "ig_q", "vc_d", "vc_q", "iL_d",
                                             "iL_q", "theta", "dw",  "u_theta", "vq",  "e_d",
                                             "e_q",  "vg_a",  "vg_b", "vg_c",  "i0_d", "i0_q"};
    for (int i = 0; i < kCols; ++i)
        if (name == alias[i]) return i;
    fail(Errc::invalid_argument, "SimTrace: unknown channel '" + name + "'");
}

const std::vector<double>& SimTrace::column(const std::string& name) const {
    return data_[column_index(name)];
}

void SimTrace::push_row(const double (&row)[kCols]) {
    for (int i = 0; i < kCols; ++i) data_[i].push_back(row[i]);
}

void SimTrace::write_csv(std::ostream& os) const {
    for (int i = 0; i < kCols; ++i) os << (i ? "," : "") << kNames[i];
    os << "\n";
    char buf[32];
    for (size_t r = 0; r < rows(); ++r) {
        for (int i = 0; i < kCols; ++i) {
            std::snprintf(buf, sizeof(buf), "%.9g", data_[i][r]);
            os << (i ? "," : "") << buf;
        }
        os << "\n";
    }
}

// ---------------------------------------------------------------------------

namespace {

struct PlantState {
    double iLd = 0, iLq = 0, vcd = 0, vcq = 0, igd = 0, igq = 0, theta = 0;
};

struct Deriv {
    double iLd, iLq, vcd, vcq, igd, igq, theta;
};

struct PlantEnv {
    const ScenarioConfig* cfg;
    double theta_dot;
    double md0, md1, mq0, mq1;  // modulation endpoints over the control period
    double t0, Ts;
    bool delayed;
    double mda, mdb, mqa, mqb;  // delay-buffer samples m[n-2], m[n-1] (then m[n])
    double mdc, mqc;
};

void applied_m(const PlantEnv& env, double t, double& md, double& mq) {
    if (!env.delayed) {
        md = env.md1;
        mq = env.mq1;
        return;
    }
    // Fractional-sample transport delay of 1.5 Ts with linear interpolation
    // over the sample history m[n-2], m[n-1], m[n].
    double x = (t - env.t0) / env.Ts;  // in [0, 1)
    if (x < 0.5) {
        double f = x + 0.5;
        md = env.mda + f * (env.mdb - env.mda);
        mq = env.mqa + f * (env.mqb - env.mqa);
    } else {
        double f = x - 0.5;
        md = env.mdb + f * (env.mdc - env.mdb);
        mq = env.mqb + f * (env.mqc - env.mqb);
    }
}

Deriv plant_deriv(const PlantState& x, double t, const PlantEnv& env) {
    const auto& cfg = *env.cfg;
    const auto& inv = cfg.inverter;
    const auto& ln = cfg.line;
    double md, mq;
    applied_m(env, t, md, mq);
    AbcSample vg = grid_voltage(t, cfg.grid, ln.omega0, inv.phases);
    double vgd, vgq;
    if (inv.phases == Phases::three)
        abc_to_dq(vg.a, vg.b, vg.c, x.theta, vgd, vgq);
    else {
        double ct = std::cos(x.theta), st = std::sin(x.theta);
        vgd = ct * vg.a + st * vg.b;
        vgq = -st * vg.a + ct * vg.b;
    }
    double td = env.theta_dot;
    Deriv d;
    d.iLd = (0.5 * inv.vdc * md - x.vcd - inv.Ri * x.iLd + inv.Li * td * x.iLq) / inv.Li;
    d.iLq = (0.5 * inv.vdc * mq - x.vcq - inv.Ri * x.iLq - inv.Li * td * x.iLd) / inv.Li;
    d.vcd = (x.iLd - x.igd + inv.Ci * td * x.vcq) / inv.Ci;
    d.vcq = (x.iLq - x.igq - inv.Ci * td * x.vcd) / inv.Ci;
    d.igd = (x.vcd - vgd - ln.R * x.igd + ln.L * td * x.igq) / ln.L;
    d.igq = (x.vcq - vgq - ln.R * x.igq - ln.L * td * x.igd) / ln.L;
    d.theta = td;
    return d;
}

PlantState rk4_step(const PlantState& x, double t, double h, const PlantEnv& env) {
    auto axpy = [](const PlantState& x0, double a, const Deriv& d) {
        PlantState y = x0;
        y.iLd += a * d.iLd;
        y.iLq += a * d.iLq;
        y.vcd += a * d.vcd;
        y.vcq += a * d.vcq;
        y.igd += a * d.igd;
        y.igq += a * d.igq;
        y.theta += a * d.theta;
        return y;
    };
    Deriv k1 = plant_deriv(x, t, env);
    Deriv k2 = plant_deriv(axpy(x, 0.5 * h, k1), t + 0.5 * h, env);
    Deriv k3 = plant_deriv(axpy(x, 0.5 * h, k2), t + 0.5 * h, env);
    Deriv k4 = plant_deriv(axpy(x, h, k3), t + h, env);
    PlantState y = x;
    y.iLd += h / 6.0 * (k1.iLd + 2 * k2.iLd + 2 * k3.iLd + k4.iLd);
    y.iLq += h / 6.0 * (k1.iLq + 2 * k2.iLq + 2 * k3.iLq + k4.iLq);
    y.vcd += h / 6.0 * (k1.vcd + 2 * k2.vcd + 2 * k3.vcd + k4.vcd);
    y.vcq += h / 6.0 * (k1.vcq + 2 * k2.vcq + 2 * k3.vcq + k4.vcq);
    y.igd += h / 6.0 * (k1.igd + 2 * k2.igd + 2 * k3.igd + k4.igd);
    y.igq += h / 6.0 * (k1.igq + 2 * k2.igq + 2 * k3.igq + k4.igq);
    y.theta += h / 6.0 * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta);
    return y;
}

double wrap_2pi(double x) {
    double y = std::fmod(x, 2.0 * M_PI);
    return y < 0.0 ? y + 2.0 * M_PI : y;
}

}  // namespace

SimResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto& inv = cfg.inverter;
    const double Ts = 1.0 / inv.fs;
    const double v_floor = 0.05 * inv.v0;

    const LineParams& dline = cfg.design_line ? *cfg.design_line : cfg.line;
    ControllerSet set = build_controller_set(dline, cfg.design, cfg.aux);
    CascadeRealization casc = realize_cascade(set, inv, dline, cfg.design, cfg.tau_i, inv.v0);

    SimResult res{SimTrace(inv.fs), SimStatus::ok, {}, 0, false};
    {
        SensitivitySet sens = closed_loop_set(gl_siso(cfg.line), set);
        StabilityVerdict sv = check_nominal_stability(sens, cfg.line, FreqGrid::log_spaced(1e-1, 1e6, 400));
        res.nominal_stability_warning = !sv.pass;
    }

    DiscreteFilter kc_d = DiscreteFilter::from_ratfun(casc.kc_d, Ts);
    DiscreteFilter kc_q = DiscreteFilter::from_ratfun(casc.kc_q, Ts);
    DiscreteFilter kv_d = DiscreteFilter::from_ratfun(casc.kv_d, Ts);
    DiscreteFilter kv_q = DiscreteFilter::from_ratfun(casc.kv_q, Ts);
    DiscreteFilter ki_d = DiscreteFilter::from_ratfun(casc.ki, Ts);
    DiscreteFilter ki_q = DiscreteFilter::from_ratfun(casc.ki, Ts);
    DiscreteFilter dw_f = DiscreteFilter::from_ratfun(casc.dw_filter, Ts);

    // --- operating point ------------------------------------------------
    const double w0 = cfg.line.omega0;
    double P0 = cfg.P0, Q0 = cfg.Q0;
    double vcd_eq = cfg.grid.v_mag, i0d = 0.0, i0q = 0.0;
    for (int it = 0; it < 80; ++it) {
        power_to_current(P0, Q0, vcd_eq, 0.0, inv.phases, v_floor, i0d, i0q);
        double vgq = -cfg.line.R * i0q - cfg.line.L * w0 * i0d;
        double rad = cfg.grid.v_mag * cfg.grid.v_mag - vgq * vgq;
        vcd_eq = std::sqrt(std::max(rad, 1e-6)) + cfg.line.R * i0d - cfg.line.L * w0 * i0q;
    }
    double vgd_eq = vcd_eq - cfg.line.R * i0d + cfg.line.L * w0 * i0q;
    double vgq_eq = -cfg.line.R * i0q - cfg.line.L * w0 * i0d;

    PlantState x;
    x.igd = i0d;
    x.igq = i0q;
    x.vcd = vcd_eq;
    x.vcq = 0.0;
    x.iLd = i0d;
    x.iLq = i0q + inv.Ci * w0 * vcd_eq;
    x.theta = -std::atan2(vgq_eq, vgd_eq);

    ki_d.init_steady(0.0, inv.Ri * x.iLd);
    ki_q.init_steady(0.0, inv.Ri * x.iLq);
    kv_d.init_steady(x.vcd, 0.0);

    double md_eq = (2.0 / inv.vdc) * (inv.Ri * x.iLd + x.vcd - inv.Li * w0 * x.iLq);
    double mq_eq = (2.0 / inv.vdc) * (inv.Ri * x.iLq + x.vcq + inv.Li * w0 * x.iLd);
    double md_hist[3] = {md_eq, md_eq, md_eq};
    double mq_hist[3] = {mq_eq, mq_eq, mq_eq};

    const double i_ref = std::max({1.0, std::abs(i0d), std::abs(i0q)});
    const double v_ref = std::max(1.0, inv.v0);
    const long n_steps = static_cast<long>(std::llround(cfg.duration * inv.fs));

    double u_theta = 0.0;
    double last_i0d = i0d, last_i0q = i0q;

    for (long n = 0; n < n_steps; ++n) {
        double t = n * Ts;

        // setpoint schedule
        for (const auto& s : cfg.setpoint_steps)
            if (t >= s.t) {
                P0 = s.P0;
                Q0 = s.Q0;
            }

        if (power_to_current(P0, Q0, x.vcd, x.vcq, inv.phases, v_floor, i0d, i0q)) {
            last_i0d = i0d;
            last_i0q = i0q;
        } else {
            i0d = last_i0d;  // voltage floor: hold and continue
            i0q = last_i0q;
        }
        if (cfg.probe && t >= cfg.probe->t_start) {
            double p = cfg.probe->amplitude * std::sin(cfg.probe->omega * (t - cfg.probe->t_start));
            (cfg.probe->axis == Axis::d ? i0d : i0q) += p;
        }

        double ed = i0d - x.igd, eq = i0q - x.igq;

        double dw = dw_f.step(eq);
        double theta_dot = w0 + dw;
        u_theta += inv.v0 * dw * Ts;

        double ucd = kc_d.step(ed), ucq = kc_q.step(eq);
        double ird = ucd + x.igd, irq = ucq + x.igq;
        double uvd = kv_d.step(x.vcd), uvq = kv_q.step(x.vcq);
        double ilsd = ird - uvd - inv.Ci * theta_dot * x.vcq;
        double ilsq = irq - uvq + inv.Ci * theta_dot * x.vcd;
        double uid = ki_d.step(ilsd - x.iLd), uiq = ki_q.step(ilsq - x.iLq);
        double md = (2.0 / inv.vdc) * (uid + x.vcd - inv.Li * theta_dot * x.iLq);
        double mq = (2.0 / inv.vdc) * (uiq + x.vcq + inv.Li * theta_dot * x.iLd);
        if (md > 1.0 || md < -1.0 || mq > 1.0 || mq < -1.0) ++res.saturation_count;
        md = std::clamp(md, -1.0, 1.0);
        mq = std::clamp(mq, -1.0, 1.0);

        md_hist[0] = md_hist[1];
        md_hist[1] = md_hist[2];
        md_hist[2] = md;
        mq_hist[0] = mq_hist[1];
        mq_hist[1] = mq_hist[2];
        mq_hist[2] = mq;

        AbcSample vg = grid_voltage(t, cfg.grid, w0, inv.phases);
        double vgd, vgq;
        if (inv.phases == Phases::three)
            abc_to_dq(vg.a, vg.b, vg.c, x.theta, vgd, vgq);
        else {
            double ct = std::cos(x.theta), st = std::sin(x.theta);
            vgd = ct * vg.a + st * vg.b;
            vgq = -st * vg.a + ct * vg.b;
        }

        double row[SimTrace::kCols] = {t,       x.igd,   x.igq, x.vcd, x.vcq, x.iLd,
                                       x.iLq,   wrap_2pi(x.theta), dw,  u_theta, vgq, ed,
                                       eq,      vg.a,    vg.b,  vg.c,  i0d,   i0q};
        res.trace.push_row(row);

        PlantEnv env;
        env.cfg = &cfg;
        env.theta_dot = theta_dot;
        env.t0 = t;
        env.Ts = Ts;
        env.delayed = cfg.delay_enabled;
        env.mda = md_hist[0];
        env.mdb = md_hist[1];
        env.mdc = md_hist[2];
        env.mqa = mq_hist[0];
        env.mqb = mq_hist[1];
        env.mqc = mq_hist[2];
        env.md1 = md;
        env.mq1 = mq;
        env.md0 = md;
        env.mq0 = mq;

        double h = Ts / cfg.substeps;
        for (int k = 0; k < cfg.substeps; ++k) x = rk4_step(x, t + k * h, h, env);

        bool finite = std::isfinite(x.igd) && std::isfinite(x.igq) && std::isfinite(x.vcd) &&
                      std::isfinite(x.vcq) && std::isfinite(x.iLd) && std::isfinite(x.iLq) &&
                      std::isfinite(x.theta);
        bool bounded = std::abs(x.igd) < 1e6 * i_ref && std::abs(x.igq) < 1e6 * i_ref &&
                       std::abs(x.iLd) < 1e6 * i_ref && std::abs(x.iLq) < 1e6 * i_ref &&
                       std::abs(x.vcd) < 1e6 * v_ref && std::abs(x.vcq) < 1e6 * v_ref;
        if (!finite || !bounded) {
            res.status = SimStatus::diverged;
            res.message = "numerical divergence at t = " + std::to_string(t);
            return res;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------

namespace {

size_t locate_row(const SimTrace& trace, double t) {
    long i = std::lround(t * trace.fs());
    if (i < 0) i = 0;
    if (static_cast<size_t>(i) >= trace.rows()) fail(Errc::invalid_argument, "trace: time out of range");
    return static_cast<size_t>(i);
}

// Single-bin amplitude of x at angular frequency w over [i0, i0+n). The
// window mean is removed first: the window only approximates an integer
// number of periods on the sample raster, and dq channels carry large dc
// components that would otherwise leak into every bin.
double bin_amplitude(const std::vector<double>& x, const std::vector<double>& tcol, size_t i0,
                     size_t n, double w) {
    double mean = 0.0;
    for (size_t k = 0; k < n; ++k) mean += x[i0 + k];
    mean /= double(n);
    std::complex<double> acc(0.0, 0.0);
    for (size_t k = 0; k < n; ++k) {
        double t = tcol[i0 + k];
        acc += (x[i0 + k] - mean) * std::complex<double>(std::cos(w * t), -std::sin(w * t));
    }
    return 2.0 * std::abs(acc) / double(n);
}

}  // namespace

HarmonicReport measure_harmonics(const SimTrace& trace, const std::string& channel, double omega0,
                                 double t_start, int cycles) {
    if (cycles < 1) fail(Errc::invalid_argument, "measure_harmonics: cycles must be >= 1");
    double T = 2.0 * M_PI / omega0;
    size_t i0 = locate_row(trace, t_start);
    size_t n = static_cast<size_t>(std::llround(cycles * T * trace.fs()));
    if (i0 + n > trace.rows()) fail(Errc::invalid_argument, "measure_harmonics: window exceeds trace");

    const auto& x = trace.column(channel);
    const auto& t = trace.column("t");
    HarmonicReport rep;
    rep.window_start = t[i0];
    rep.window_seconds = n / trace.fs();
    rep.magnitude.assign(14, 0.0);
    double sq = 0.0;
    for (int h = 1; h <= 13; ++h) {
        rep.magnitude[h] = bin_amplitude(x, t, i0, n, h * omega0);
        if (h >= 2) sq += rep.magnitude[h] * rep.magnitude[h];
    }
    rep.thd = rep.magnitude[1] > 0.0 ? std::sqrt(sq) / rep.magnitude[1] : 0.0;
    return rep;
}

double measure_tone(const SimTrace& trace, const std::string& channel, double omega, double t_start,
                    int periods) {
    double T = 2.0 * M_PI / omega;
    size_t i0 = locate_row(trace, t_start);
    size_t n = static_cast<size_t>(std::llround(periods * T * trace.fs()));
    if (i0 + n > trace.rows()) fail(Errc::invalid_argument, "measure_tone: window exceeds trace");
    return bin_amplitude(trace.column(channel), trace.column("t"), i0, n, omega);
}

double band_rms(const SimTrace& trace, const std::string& channel, double omega0, double t_start,
                int cycles, double w_lo, double w_hi) {
    double T = 2.0 * M_PI / omega0;
    size_t i0 = locate_row(trace, t_start);
    size_t n = static_cast<size_t>(std::llround(cycles * T * trace.fs()));
    if (i0 + n > trace.rows()) fail(Errc::invalid_argument, "band_rms: window exceeds trace");
    const auto& x = trace.column(channel);
    const auto& t = trace.column("t");
    double dw = omega0 / cycles;
    double acc = 0.0;
    for (long m = std::lround(std::ceil(w_lo / dw)); m * dw <= w_hi; ++m) {
        double a = bin_amplitude(x, t, i0, n, m * dw);
        acc += 0.5 * a * a;
    }
    return std::sqrt(acc);
}

TransientMetrics transient_metrics(const SimTrace& trace, const std::string& channel, double t_event) {
    TransientMetrics m;
    const auto& x = trace.column(channel);
    const auto& t = trace.column("t");
    if (trace.rows() < 16) return m;
    size_t ie = locate_row(trace, t_event);
    if (ie + 8 >= trace.rows() || ie < 4) return m;

    // initial value: 10 ms (or whatever exists) before the event
    size_t pre = std::min<size_t>(ie, static_cast<size_t>(0.010 * trace.fs()) + 1);
    double x0 = 0.0;
    for (size_t k = ie - pre; k < ie; ++k) x0 += x[k];
    x0 /= double(pre);

    // final value: mean over the last 5% of the trace
    size_t tail = std::max<size_t>(8, trace.rows() / 20);
    double xf = 0.0;
    for (size_t k = trace.rows() - tail; k < trace.rows(); ++k) xf += x[k];
    xf /= double(tail);

    m.final_value = xf;
    m.step_size = xf - x0;
    if (std::abs(m.step_size) < 1e-12) return m;  // zero-amplitude step: flagged invalid
    m.valid = true;

    double h = 1.0 / trace.fs();
    double rid = 0.0;
    for (size_t k = std::max<size_t>(ie, 2); k + 2 < trace.rows(); ++k) {
        double d = (-x[k + 2] + 8.0 * x[k + 1] - 8.0 * x[k - 1] + x[k - 2]) / (12.0 * h);
        rid = std::max(rid, std::abs(d));
    }
    m.rocof_max = rid;

    double ext = x[ie];
    for (size_t k = ie; k < trace.rows(); ++k)
        if (std::abs(x[k] - x0) > std::abs(ext - x0)) ext = x[k];
    m.extremum = ext;
    m.overshoot = (ext - xf) / m.step_size;

    double band = 0.02 * std::abs(m.step_size);
    size_t settle_idx = ie;
    for (size_t k = trace.rows(); k-- > ie;) {
        if (std::abs(x[k] - xf) > band) {
            settle_idx = k + 1;
            break;
        }
    }
    m.settle_time = t[std::min(settle_idx, trace.rows() - 1)] - t[ie];
    return m;
}

}  // namespace egfl
