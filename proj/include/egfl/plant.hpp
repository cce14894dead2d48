#pragma once

#include "egfl/ratfun.hpp"

namespace egfl {

/// RL line between inverter capacitor voltage and grid voltage, dq frame.
struct LineParams {
    double L = 0.0;       // H
    double R = 0.0;       // ohm
    double lambda = 0.0;  // R/L, 1/s
    double omega0 = 0.0;  // nominal grid angular frequency, rad/s

    static LineParams make(double L, double R, double omega0);
    /// Characteristic polynomial s^2 + 2*lambda*s + lambda^2 + omega0^2.
    /// Every module builds this factor through here so that constructed
    /// plant-pole cancellations match bit-for-bit.
    Polynomial char_poly() const;
};

enum class Phases { single, three };

struct InverterParams {
    double Li = 0.0;   // filter inductance, H
    double Ci = 0.0;   // filter capacitance, F
    double Ri = 0.0;   // filter ESR, ohm
    double vdc = 0.0;  // dc-link voltage, V
    double fs = 0.0;   // sampling frequency, Hz (= fsw)
    double fsw = 0.0;  // switching frequency, Hz
    double v0 = 0.0;   // nominal grid voltage magnitude (peak), V
    Phases phases = Phases::three;

    void validate() const;
};

/// Interval uncertainty for the line impedance, with the induced lambda bounds.
struct UncertaintyBox {
    double Lmin = 0.0, Lmax = 0.0;  // H
    double Rmin = 0.0, Rmax = 0.0;  // ohm
    double lambda_min = 0.0;        // Rmin/Lmax
    double lambda_max = 0.0;        // Rmax/Lmin

    static UncertaintyBox make(double Lmin, double Lmax, double Rmin, double Rmax);
    bool is_point() const { return Lmin == Lmax && Rmin == Rmax; }
};

struct NominalPlant {
    double L0 = 0.0;       // 2*Lmin*Lmax/(Lmin+Lmax)
    double lambda0 = 0.0;  // (lmax*Lmax + lmin*Lmin)/(Lmin+Lmax)
    LineParams line;       // nominal line (R0 = lambda0*L0)
    RatFun gl0;            // SISO plant of the nominal line
};

/// MIMO line admittance G_L(s) = [[s+l, w0],[-w0, s+l]] / (L*(s^2+2ls+l^2+w0^2)).
TF2 gl_mimo(const LineParams& p);

/// SISO part ((s+lambda)/L) / (s^2+2*lambda*s+lambda^2+omega0^2).
RatFun gl_siso(const LineParams& p);

/// Gamma = G_L_siso * G_L^-1, the coupling matrix of the dq plant. Verified
/// against the defining identity Gamma*G_L = gl_siso*I at construction.
TF2 gamma(const LineParams& p);

/// E = Gamma^-1 - I = [[0, w0/(s+l)],[-w0/(s+l), 0]], the multiplicative
/// perturbation in G_L = gl_siso * (I + E).
TF2 coupling_matrix(const LineParams& p);

/// sigma_max(Gamma(jw) - I): w0*sqrt((w+w0)^2+l^2)/|(w+jl)^2-w0^2|.
double coupling_gap(const LineParams& p, double omega);

/// Reciprocal of coupling_gap: the admissible ceiling on the 2-SISO
/// sensitivity magnitude for the decoupling condition. Returns 0 exactly at
/// w = w0 when R = 0; callers treat that point as excluded.
double decoupling_bound(const LineParams& p, double omega);

NominalPlant nominal_plant(const UncertaintyBox& box, double omega0);

struct RSWeights {
    RatFun w1, w2, w3;
    /// Worst ratio of corner perturbation to weight magnitude over the grid
    /// (<= 1 means the weight majorizes that corner).
    double w1_cover_margin = 0.0;
    double w2_cover_margin = 0.0;
    /// The printed W2 matches the lambda_max pole perturbation exactly but,
    /// for asymmetric boxes, undershoots the lambda_min side; this flag
    /// records whether that side happened to be covered too.
    bool w2_covers_lambda_min = true;
};

/// Uncertainty weights W1, W2 and the bandwidth weight W3 = w_bw/(s+w_bw) for
/// the robust-stability test, with a numerical check that the weights cover
/// the box corners on the grid. Throws "weights do not cover box" when the
/// construction-exact inequalities are violated.
RSWeights rs_weights(const UncertaintyBox& box, const NominalPlant& nom, double omega_bw,
                     const FreqGrid& grid);

}  // namespace egfl
