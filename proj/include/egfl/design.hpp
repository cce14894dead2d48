#pragma once

#include <optional>
#include <vector>

#include "egfl/plant.hpp"

namespace egfl {

/// Tuning knobs of the three loop shapers: lead ratio and target crossover
/// per axis, plus the synchronization-loop pair (alpha_theta, omega_theta).
struct DesignParams {
    double alpha_d = 0.4;
    double omega_d = 0.0;  // rad/s
    double alpha_q = 0.5;
    double omega_q = 0.0;  // rad/s
    double alpha_theta = 0.5;
    double omega_theta = 0.0;  // rad/s

    void validate() const;
};

enum class AuxKind { pr, lead, notch };

/// Auxiliary compensator cascaded onto the base design. PR and lead attach to
/// K^d and K1^q; the notch attaches to the K2^q synchronization path.
struct AuxCompensator {
    AuxKind kind = AuxKind::pr;
    // PR
    double gain = 0.0;     // k
    double damping = 0.0;  // xi
    int order = 2;         // harmonic order n (dq frame), n >= 1
    // lead
    double alpha = 0.0;
    double omega_r = 0.0;  // rad/s
    // notch
    double omega_n = 0.0;  // rad/s
    double xi_n = 0.7;
};

struct ControllerSet {
    RatFun kd;    // full K^d including aux
    RatFun k1q;   // full K1^q including aux
    RatFun k2q;   // full K2^q including notch
    RatFun aux_dq;     // product of PR/lead compensators applied to kd and k1q
    RatFun notch_2q;   // product of notch compensators applied to k2q
    std::vector<AuxCompensator> aux_d;
    std::vector<AuxCompensator> aux_q;
};

/// Inner/outer-loop realization of the designed controllers around the
/// inverter dynamics.
struct CascadeRealization {
    RatFun ki;            // inner current compensator (Li s + Ri)/(tau_i s)
    RatFun kv_d, kv_q;    // voltage compensators
    RatFun kc_d, kc_q;    // series compensators, aux included
    RatFun dw_filter;     // s*K2^q/v0 -> frame frequency deviation
    double tau_i = 1e-4;  // s
};

/// K^d of the d-axis shaper: integrator + lead, one pole at the origin.
RatFun design_kd(const LineParams& line, double alpha_d, double omega_d);

/// K1^q: lead + band-pass, exactly one zero at the origin.
RatFun design_k1q(const LineParams& line, double alpha_q, double omega_q, double omega_theta);

/// K2^q: double integrator + lead with the plant poles cancelled by
/// construction, so K2^q * gl_siso collapses to the printed second-order form.
RatFun design_k2q(const LineParams& line, double alpha_theta, double omega_theta);

/// 1 + k * (2 n xi w0 s)/(s^2 + 2 n xi w0 s + (n w0)^2).
RatFun pr_compensator(double k, double xi, int n, double omega0);

/// (s + alpha*omega_r)/(s + omega_r/alpha), 0 < alpha < 1.
RatFun lead(double alpha, double omega_r);

/// (s^2 + omega_n^2)/(s^2 + 2 xi_n omega_n s + omega_n^2).
RatFun notch(double omega_n, double xi_n);

struct PmPrediction {
    double pm_deg = 0.0;
    bool in_validity_range = true;  // crossover >= 2*pi*120
};

enum class Axis { d, q };

/// Closed-form phase-margin prediction of the shaped open loops.
PmPrediction predicted_pm(const DesignParams& dp, const LineParams& line, Axis axis);

struct InnerLoop {
    RatFun ki, ti, si;
};

/// K_i = (Li s + Ri)/(tau_i s) shaping the inner current loop into
/// T_i = 1/(tau_i s + 1); the identity T_i + S_i = 1 is exact.
InnerLoop inner_loop(const InverterParams& inv, double tau_i);

/// Builds the full controller set from the base designs plus aux compensators.
ControllerSet build_controller_set(const LineParams& line, const DesignParams& dp,
                                   const std::vector<AuxCompensator>& aux);

/// Maps the controller set into {K_i, K_v, K_c} around the inverter dynamics
/// and verifies that G_v T_i S_v K_c reproduces the targets within 5% up to
/// 1/(10 tau_i).
CascadeRealization realize_cascade(const ControllerSet& set, const InverterParams& inv,
                                   const LineParams& line, const DesignParams& dp, double tau_i,
                                   double v0);

/// Phase lag of the 1.5/fs control delay at omega: -1.5*omega/fs rad.
double delay_phase(double fs, double omega);

/// Prop.-4.3 style origin pole/zero counting on the designed set.
struct SyncVerdict {
    bool pass = false;
    int kd_origin_poles = 0;
    int kq_origin_poles = 0;   // of K1^q + K2^q
    int ratio_origin_zeros = 0;  // of K1^q / K2^q
};
SyncVerdict check_synchronization(const ControllerSet& set);

}  // namespace egfl
