#include "egfl/design.hpp"

#include <cmath>

#include "egfl/error.hpp"

namespace egfl {

void DesignParams::validate() const {
    auto ratio_ok = [](double a) { return a > 0.0 && a <= 1.0; };
    if (!ratio_ok(alpha_d) || !ratio_ok(alpha_q) || !ratio_ok(alpha_theta))
        fail(Errc::invalid_argument, "DesignParams: lead ratios must satisfy 0 < alpha <= 1");
    if (!(omega_d > 0.0) || !(omega_q > 0.0) || !(omega_theta > 0.0))
        fail(Errc::invalid_argument, "DesignParams: crossovers must be positive");
    if (!(omega_theta < omega_q))
        fail(Errc::invalid_argument, "DesignParams: need omega_theta < omega_q (band-pass ordering)");
}

RatFun design_kd(const LineParams& line, double alpha_d, double omega_d) {
    if (!(alpha_d > 0.0 && alpha_d <= 1.0) || !(omega_d > 0.0))
        fail(Errc::invalid_argument, "design_kd: need 0 < alpha_d <= 1 and omega_d > 0");
    double g = line.L * omega_d * std::hypot(omega_d, line.lambda) / alpha_d;
    return RatFun::from_factors(g, {Polynomial::linear(alpha_d * omega_d)},
                                {Polynomial::s(), Polynomial::linear(omega_d / alpha_d)});
}

RatFun design_k1q(const LineParams& line, double alpha_q, double omega_q, double omega_theta) {
    if (!(alpha_q > 0.0 && alpha_q <= 1.0) || !(omega_q > 0.0) || !(omega_theta > 0.0) ||
        !(omega_theta < omega_q))
        fail(Errc::invalid_argument, "design_k1q: need 0 < alpha_q <= 1, 0 < omega_theta < omega_q");
    double g = line.L * omega_q * omega_q / alpha_q;
    return RatFun::from_factors(
        g, {Polynomial::linear(alpha_q * omega_q), Polynomial::s()},
        {Polynomial::linear(omega_q / alpha_q), Polynomial::linear(line.lambda),
         Polynomial::linear(omega_theta / 5.0)});
}

RatFun design_k2q(const LineParams& line, double alpha_theta, double omega_theta) {
    if (!(alpha_theta > 0.0 && alpha_theta <= 1.0) || !(omega_theta > 0.0))
        fail(Errc::invalid_argument, "design_k2q: need 0 < alpha_theta <= 1 and omega_theta > 0");
    double g = line.L * omega_theta * omega_theta / alpha_theta;
    return RatFun::from_factors(
        g, {Polynomial::linear(alpha_theta * omega_theta), line.char_poly()},
        {Polynomial::s(), Polynomial::s(), Polynomial::linear(omega_theta / alpha_theta),
         Polynomial::linear(line.lambda)});
}

RatFun pr_compensator(double k, double xi, int n, double omega0) {
    if (!(k >= 0.0) || !(xi > 0.0) || n < 1 || !(omega0 > 0.0))
        fail(Errc::invalid_argument, "pr_compensator: need k >= 0, xi > 0, n >= 1");
    double wr = n * omega0;
    double b = 2.0 * n * xi * omega0;
    Polynomial den = Polynomial::quadratic(wr * wr, b);
    RatFun resonant = RatFun::from_factors(k * b, {Polynomial::s()}, {den});
    return RatFun::one() + resonant;
}

RatFun lead(double alpha, double omega_r) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(omega_r > 0.0))
        fail(Errc::invalid_argument, "lead: need 0 < alpha < 1 and omega_r > 0");
    return RatFun::from_factors(1.0, {Polynomial::linear(alpha * omega_r)},
                                {Polynomial::linear(omega_r / alpha)});
}

RatFun notch(double omega_n, double xi_n) {
    if (!(omega_n > 0.0) || !(xi_n > 0.0))
        fail(Errc::invalid_argument, "notch: need omega_n > 0 and xi_n > 0");
    return RatFun(Polynomial::quadratic(omega_n * omega_n, 0.0),
                  Polynomial::quadratic(omega_n * omega_n, 2.0 * xi_n * omega_n));
}

PmPrediction predicted_pm(const DesignParams& dp, const LineParams& line, Axis axis) {
    constexpr double rad2deg = 180.0 / M_PI;
    PmPrediction out;
    double crossover = (axis == Axis::d) ? dp.omega_d : dp.omega_q;
    out.in_validity_range = crossover >= 2.0 * M_PI * 120.0;
    if (axis == Axis::d) {
        double a = dp.alpha_d;
        out.pm_deg = 90.0 + rad2deg * std::asin((1.0 - a * a) / (1.0 + a * a)) -
                     rad2deg * std::atan(dp.omega_d / line.lambda);
    } else {
        double a = dp.alpha_q;
        out.pm_deg = rad2deg * std::asin((1.0 - a * a) / (1.0 + a * a));
    }
    return out;
}

InnerLoop inner_loop(const InverterParams& inv, double tau_i) {
    if (!(tau_i > 0.0)) fail(Errc::invalid_argument, "inner_loop: tau_i must be positive");
    InnerLoop il;
    Polynomial gi_den{inv.Ri, inv.Li};
    il.ki = RatFun::from_factors(1.0 / tau_i, {gi_den}, {Polynomial::s()});
    il.ti = RatFun(Polynomial{1.0}, Polynomial{1.0, tau_i});
    il.si = RatFun(Polynomial{0.0, tau_i}, Polynomial{1.0, tau_i});
    return il;
}

ControllerSet build_controller_set(const LineParams& line, const DesignParams& dp,
                                   const std::vector<AuxCompensator>& aux) {
    dp.validate();
    ControllerSet set;
    set.kd = design_kd(line, dp.alpha_d, dp.omega_d);
    set.k1q = design_k1q(line, dp.alpha_q, dp.omega_q, dp.omega_theta);
    set.k2q = design_k2q(line, dp.alpha_theta, dp.omega_theta);
    set.aux_dq = RatFun::one();
    set.notch_2q = RatFun::one();
    for (const auto& a : aux) {
        switch (a.kind) {
            case AuxKind::pr:
                if (!(a.gain > 0.0)) fail(Errc::invalid_argument, "aux pr: gain must be positive");
                set.aux_dq = set.aux_dq * pr_compensator(a.gain, a.damping, a.order, line.omega0);
                set.aux_d.push_back(a);
                set.aux_q.push_back(a);
                break;
            case AuxKind::lead:
                set.aux_dq = set.aux_dq * lead(a.alpha, a.omega_r);
                set.aux_d.push_back(a);
                set.aux_q.push_back(a);
                break;
            case AuxKind::notch:
                set.notch_2q = set.notch_2q * notch(a.omega_n, a.xi_n);
                set.aux_q.push_back(a);
                break;
        }
    }
    set.kd = set.kd * set.aux_dq;
    set.k1q = set.k1q * set.aux_dq;
    set.k2q = set.k2q * set.notch_2q;
    return set;
}

CascadeRealization realize_cascade(const ControllerSet& set, const InverterParams& inv,
                                   const LineParams& line, const DesignParams& dp, double tau_i,
                                   double v0) {
    if (set.kd.relative_degree() < 1 || set.k1q.relative_degree() < 1)
        fail(Errc::invalid_argument, "realize_cascade: target not realizable through cascade "
                                     "(relative degree 0)");
    CascadeRealization cr;
    cr.tau_i = tau_i;
    cr.ki = inner_loop(inv, tau_i).ki;

    double w_lc2 = 1.0 / (line.L * inv.Ci);
    double ad = dp.alpha_d, wd = dp.omega_d;
    double aq = dp.alpha_q, wq = dp.omega_q, wt = dp.omega_theta;

    cr.kc_d = RatFun::constant(wd * std::hypot(wd, line.lambda) / (ad * w_lc2)) * set.aux_dq;
    cr.kv_d = RatFun::from_factors(inv.Ci * wd * (1.0 / ad - ad), {Polynomial::s()},
                                   {Polynomial::linear(wd * ad)});
    cr.kc_q = RatFun::from_factors(wq * wq / (aq * w_lc2), {Polynomial::linear(aq * wq)},
                                   {Polynomial::linear(wq / aq)}) *
              set.aux_dq;
    // K_v^q = Ci*(lambda + wt/5) + Ci*lambda*wt/(5 s)
    cr.kv_q = RatFun(Polynomial{inv.Ci * line.lambda * wt / 5.0, inv.Ci * (line.lambda + wt / 5.0)},
                     Polynomial::s());
    cr.dw_filter = RatFun(Polynomial::s(), Polynomial{1.0}) * set.k2q.scaled(1.0 / v0);

    // Reconstruction check: G_v T_i S_v K_c must reproduce the target K within
    // 5% magnitude up to 1/(10 tau_i).
    InnerLoop il = inner_loop(inv, tau_i);
    RatFun gv = RatFun::from_factors(1.0 / inv.Ci, {}, {Polynomial::s()});
    auto reconstruct = [&](const RatFun& kv, const RatFun& kc) {
        RatFun sv = (RatFun::one() + gv * il.ti * kv).inverse();
        return gv * il.ti * sv * kc;
    };
    RatFun kd_hat = reconstruct(cr.kv_d, cr.kc_d);
    RatFun k1q_hat = reconstruct(cr.kv_q, cr.kc_q);
    FreqGrid sweep = FreqGrid::log_spaced(1.0, 1.0 / (10.0 * tau_i), 200);
    for (double w : sweep.omegas()) {
        double rd = std::abs(freq_eval(kd_hat, w)) / std::abs(freq_eval(set.kd, w));
        double rq = std::abs(freq_eval(k1q_hat, w)) / std::abs(freq_eval(set.k1q, w));
        if (rd < 0.95 || rd > 1.05 || rq < 0.95 || rq > 1.05)
            fail(Errc::numeric, "realize_cascade: reconstruction drifts beyond 5% inside the "
                                "validity band");
    }
    return cr;
}

double delay_phase(double fs, double omega) {
    if (!(fs > 0.0)) fail(Errc::invalid_argument, "delay_phase: fs must be positive");
    return -1.5 * omega / fs;
}

SyncVerdict check_synchronization(const ControllerSet& set) {
    SyncVerdict v;
    v.kd_origin_poles = set.kd.origin_poles();
    RatFun kq = set.k1q + set.k2q;
    v.kq_origin_poles = kq.origin_poles();
    RatFun ratio = set.k1q / set.k2q;
    v.ratio_origin_zeros = ratio.origin_zeros();
    v.pass = v.kd_origin_poles >= 1 && v.kq_origin_poles >= 2 && v.ratio_origin_zeros >= 2;
    return v;
}

}  // namespace egfl
