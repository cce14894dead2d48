#pragma once

#include "egfl/design.hpp"
#include "egfl/plant.hpp"

namespace egfl {

/// Closed-loop transfer set of the 2-SISO factorization. Construction checks
/// the algebraic identities S+T = 1 and T^q = T_theta + T_v both
/// coefficient-wise and on the grid; a violation indicates an arithmetic bug
/// and raises "algebraic inconsistency".
struct SensitivitySet {
    RatFun s_d, s_q;      // sensitivities
    RatFun t_d, t_q;      // complementary sensitivities
    RatFun t_theta;       // grid-frequency -> inverter-frequency (low pass)
    RatFun t_v;           // grid-frequency disturbance -> v_c^q (band pass)
};

/// S = 1/(1 + gl*k).
RatFun siso_sensitivity(const RatFun& gl, const RatFun& k);

SensitivitySet closed_loop_set(const RatFun& gl, const ControllerSet& set);

struct StabilityVerdict {
    bool pass = false;
    bool s_d_hurwitz = false;
    bool s_q_hurwitz = false;
    double eps_max = 0.0;
    double eps_max_omega = 0.0;
};

/// Nominal internal stability: Hurwitz 2-SISO sensitivities plus the
/// decoupling condition max_w eps(w) < 1 with
/// eps = max(|S_d|,|S_q|) * sigma_max(Gamma - I).
StabilityVerdict check_nominal_stability(const SensitivitySet& sens, const LineParams& line,
                                         const FreqGrid& grid);

struct CouplingPoint {
    double omega = 0.0;
    double eps = 0.0;
    double xc_gap = 0.0;  // sigma_max(X_c - I) by direct 2x2 inversion
    double bound = 0.0;   // eps/(1-eps)
    bool applicable = false;  // eps < 1
};

/// Per-frequency coupling perturbation X_c = (I + (Gamma - I) S)^-1 and its
/// Neumann bound.
std::vector<CouplingPoint> coupling_perturbation(const SensitivitySet& sens, const LineParams& line,
                                                 const FreqGrid& grid);

struct RSPoint {
    double omega = 0.0;
    double s0_mag = 0.0;      // max(|S0_d|, |S0_q|)
    double ceiling1 = 0.0;    // (1 - |W1 W3|)/|W2|, +inf for a point box
    double ceiling2 = 0.0;    // decoupling bound at lambda_min
    double margin = 0.0;      // s0_mag / min(ceiling1, ceiling2)
    bool c1_applicable = true;  // |W1 W3| < 1
};

struct RSReport {
    bool pass = false;
    double worst_margin = 0.0;
    double binding_omega = 0.0;
    RSWeights weights;
    std::vector<RSPoint> curve;
};

/// Robust stability of the nominal design against the impedance box: the
/// nominal sensitivities must clear both the SISO uncertainty ceiling and the
/// lambda_min coupling ceiling at every grid point.
RSReport check_robust_stability(const NominalPlant& nom, const ControllerSet& set,
                                const UncertaintyBox& box, double omega_bw, const FreqGrid& grid);

struct LoopReport {
    double ms = 0.0;              // peak sensitivity
    double ms_omega = 0.0;        // rad/s
    double pm_deg = 0.0;          // +inf sentinel when no gain crossover
    double gm = 0.0;              // ratio; +inf when no phase crossover
    double crossover = 0.0;       // rad/s, first unit-gain crossing
    double omega_b = 0.0;         // effective control bandwidth
    double omega_t = 0.0;         // high-frequency rolloff corner
    double pm_bound_deg = 0.0;    // 2*asin(1/(2*Ms))
    double gm_bound = 0.0;        // Ms/(Ms-1)
};

/// Frequency-domain loop metrics of a strictly proper open loop.
LoopReport loop_metrics(const RatFun& open_loop, const FreqGrid& grid);

struct BodeAudit {
    double integral = 0.0;       // int_0^inf ln|S| dw (theoretically 0)
    double integral_abs = 0.0;   // int_0^inf |ln|S|| dw
    double low_band = 0.0;       // |int_0^wB ln|S| dw|
    double lhs = 0.0;            // (low_band - 0.75 wT)/(wT - wB)
    double ln_ms = 0.0;
    bool pass = false;
    LoopReport metrics;
};

/// Numerical audit of the sensitivity integral and the peak-sensitivity
/// lower bound. Requires loop relative degree >= 2 and a Hurwitz sensitivity.
BodeAudit bode_integral_audit(const RatFun& s_tilde, const RatFun& open_loop, const FreqGrid& grid);

}  // namespace egfl
