#include "egfl/loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "egfl/error.hpp"

namespace egfl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RatFun siso_sensitivity(const RatFun& gl, const RatFun& k) {
    RatFun denom = RatFun::one() + gl * k;
    if (denom.is_zero()) fail(Errc::invalid_argument, "siso_sensitivity: 1 + gl*k is identically zero");
    return denom.inverse();
}

SensitivitySet closed_loop_set(const RatFun& gl, const ControllerSet& set) {
    SensitivitySet ss;
    RatFun kq = set.k1q + set.k2q;
    // The complementary functions reuse the constructed loop products so the
    // shared factors cancel exactly.
    RatFun l_d = gl * set.kd;
    RatFun l_q = gl * kq;
    ss.s_d = (RatFun::one() + l_d).inverse();
    ss.s_q = (RatFun::one() + l_q).inverse();
    ss.t_d = l_d * ss.s_d;
    ss.t_q = l_q * ss.s_q;
    ss.t_theta = set.k2q * gl * ss.s_q;
    ss.t_v = set.k1q * gl * ss.s_q;

    auto check_one = [](const RatFun& r, const char* what) {
        bool ok = r.num().degree() == 0 && r.den().degree() == 0 &&
                  std::abs(r.num()[0] - 1.0) <= 1e-9;
        if (!ok) fail(Errc::numeric, std::string("closed_loop_set: algebraic inconsistency (") + what + ")");
    };
    check_one(ss.s_d + ss.t_d, "S_d + T_d != 1");
    check_one(ss.s_q + ss.t_q, "S_q + T_q != 1");
    RatFun sum = ss.t_theta + ss.t_v;
    if (!sum.almost_equal(ss.t_q, 1e-9))
        fail(Errc::numeric, "closed_loop_set: algebraic inconsistency (T_q != T_theta + T_v)");
    return ss;
}

StabilityVerdict check_nominal_stability(const SensitivitySet& sens, const LineParams& line,
                                         const FreqGrid& grid) {
    StabilityVerdict v;
    v.s_d_hurwitz = is_hurwitz(sens.s_d).hurwitz;
    v.s_q_hurwitz = is_hurwitz(sens.s_q).hurwitz;
    for (double w : grid.omegas()) {
        double smag = std::max(std::abs(freq_eval(sens.s_d, w)), std::abs(freq_eval(sens.s_q, w)));
        double eps = smag * coupling_gap(line, w);
        if (eps > v.eps_max) {
            v.eps_max = eps;
            v.eps_max_omega = w;
        }
    }
    v.pass = v.s_d_hurwitz && v.s_q_hurwitz && v.eps_max < 1.0;
    return v;
}

std::vector<CouplingPoint> coupling_perturbation(const SensitivitySet& sens, const LineParams& line,
                                                 const FreqGrid& grid) {
    TF2 gm = gamma(line);
    std::vector<CouplingPoint> out;
    out.reserve(grid.size());
    for (double w : grid.omegas()) {
        CouplingPoint pt;
        pt.omega = w;
        Complex sd = freq_eval(sens.s_d, w), sq = freq_eval(sens.s_q, w);
        double smag = std::max(std::abs(sd), std::abs(sq));
        pt.eps = smag * coupling_gap(line, w);
        Mat2 g = gm.eval(w);
        Mat2 i2 = Mat2::identity();
        Mat2 gs = g - i2;  // (Gamma - I) * diag(S)
        gs.e[0][0] *= sd;
        gs.e[1][0] *= sd;
        gs.e[0][1] *= sq;
        gs.e[1][1] *= sq;
        Mat2 m = i2;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) m.e[r][c] += gs.e[r][c];
        Mat2 xc = m.inverse();
        pt.xc_gap = sigma_max(xc - i2);
        pt.applicable = pt.eps < 1.0;
        pt.bound = pt.applicable ? pt.eps / (1.0 - pt.eps) : kInf;
        if (pt.applicable && pt.xc_gap > pt.bound * (1.0 + 1e-9) + 1e-12)
            fail(Errc::numeric, "coupling_perturbation: Neumann bound violated");
        out.push_back(pt);
    }
    return out;
}

RSReport check_robust_stability(const NominalPlant& nom, const ControllerSet& set,
                                const UncertaintyBox& box, double omega_bw, const FreqGrid& grid) {
    NominalPlant np = nominal_plant(box, nom.line.omega0);
    if (std::abs(np.L0 - nom.L0) > 1e-9 * np.L0 ||
        std::abs(np.lambda0 - nom.lambda0) > 1e-9 * std::max(1.0, np.lambda0))
        fail(Errc::invalid_argument, "check_robust_stability: nominal plant does not match the box");
    RSReport rep;
    rep.weights = rs_weights(box, nom, omega_bw, grid);
    SensitivitySet sens = closed_loop_set(nom.gl0, set);
    LineParams lmin_line = LineParams::make(1.0, box.lambda_min, nom.line.omega0);

    rep.curve.reserve(grid.size());
    bool pass = true;
    for (double w : grid.omegas()) {
        RSPoint pt;
        pt.omega = w;
        pt.s0_mag = std::max(std::abs(freq_eval(sens.s_d, w)), std::abs(freq_eval(sens.s_q, w)));
        if (rep.weights.w2.is_zero()) {
            pt.ceiling1 = kInf;
        } else {
            double w1w3 = std::abs(freq_eval(rep.weights.w1, w)) * std::abs(freq_eval(rep.weights.w3, w));
            double w2 = std::abs(freq_eval(rep.weights.w2, w));
            pt.c1_applicable = w1w3 < 1.0;
            pt.ceiling1 = pt.c1_applicable ? (1.0 - w1w3) / w2 : 0.0;
        }
        pt.ceiling2 = decoupling_bound(lmin_line, w);
        double ceiling = std::min(pt.ceiling1, pt.ceiling2);
        pt.margin = ceiling > 0.0 ? pt.s0_mag / ceiling : kInf;
        if (!(pt.margin < 1.0)) pass = false;
        if (pt.margin > rep.worst_margin) {
            rep.worst_margin = pt.margin;
            rep.binding_omega = w;
        }
        rep.curve.push_back(pt);
    }
    rep.pass = pass && is_hurwitz(sens.s_d).hurwitz && is_hurwitz(sens.s_q).hurwitz;
    return rep;
}

namespace {

double sens_mag(const RatFun& loop, double w) {
    return 1.0 / std::abs(1.0 + freq_eval(loop, w));
}

// Golden-section maximization of f on [a, b].
template <typename F>
std::pair<double, double> golden_max(F f, double a, double b) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-12 * b; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

LoopReport loop_metrics(const RatFun& open_loop, const FreqGrid& grid) {
    if (open_loop.relative_degree() < 1)
        fail(Errc::invalid_argument, "loop_metrics: open loop must be strictly proper");
    const auto& w = grid.omegas();
    const size_t n = w.size();

    std::vector<Complex> L(n);
    std::vector<double> mag(n), smag(n);
    for (size_t i = 0; i < n; ++i) {
        L[i] = freq_eval(open_loop, w[i]);
        mag[i] = std::abs(L[i]);
        smag[i] = 1.0 / std::abs(1.0 + L[i]);
    }

    LoopReport rep;

    // Peak sensitivity with a golden-section polish around the grid maximum.
    size_t imax = std::max_element(smag.begin(), smag.end()) - smag.begin();
    double lo = w[imax > 0 ? imax - 1 : imax], hi = w[std::min(imax + 1, n - 1)];
    auto f = [&](double x) { return sens_mag(open_loop, x); };
    auto [wpk, ms] = golden_max(f, lo, hi);
    rep.ms = ms;
    rep.ms_omega = wpk;
    rep.pm_bound_deg = 2.0 * std::asin(std::min(1.0, 1.0 / (2.0 * ms))) * 180.0 / M_PI;
    rep.gm_bound = ms > 1.0 ? ms / (ms - 1.0) : kInf;

    // Gain crossovers -> phase margin (worst over all crossings).
    rep.pm_deg = kInf;
    rep.crossover = 0.0;
    for (size_t i = 0; i + 1 < n; ++i) {
        if ((mag[i] - 1.0) * (mag[i + 1] - 1.0) <= 0.0 && mag[i] != mag[i + 1]) {
            double t = (std::log(1.0) - std::log(mag[i])) / (std::log(mag[i + 1]) - std::log(mag[i]));
            double wc = std::exp(std::log(w[i]) + t * (std::log(w[i + 1]) - std::log(w[i])));
            double pm = 180.0 + std::arg(freq_eval(open_loop, wc)) * 180.0 / M_PI;
            if (pm > 360.0) pm -= 360.0;
            if (rep.crossover == 0.0) rep.crossover = wc;
            rep.pm_deg = std::min(rep.pm_deg, pm);
        }
    }

    // Phase crossings of -180 deg (mod 360) -> gain margin.
    rep.gm = kInf;
    double phase = std::arg(L[0]);
    for (size_t i = 0; i + 1 < n; ++i) {
        double dphi = std::arg(L[i + 1] / L[i]);
        double next = phase + dphi;
        // crossing of an odd multiple of pi?
        double a = (phase + M_PI) / (2.0 * M_PI), b = (next + M_PI) / (2.0 * M_PI);
        if (std::floor(a) != std::floor(b) && std::abs(dphi) < M_PI) {
            double kcross = std::max(std::floor(a), std::floor(b));
            double target = kcross * 2.0 * M_PI - M_PI;
            double t = (target - phase) / dphi;
            double wc = std::exp(std::log(w[i]) + t * (std::log(w[i + 1]) - std::log(w[i])));
            double g = std::abs(freq_eval(open_loop, wc));
            if (g > 0.0) rep.gm = std::min(rep.gm, 1.0 / g);
        }
        phase = next;
    }

    // Effective control bandwidth: largest w below which |S| <= 1 throughout.
    rep.omega_b = w.back();
    for (size_t i = 0; i < n; ++i) {
        if (smag[i] > 1.0) {
            if (i == 0) {
                rep.omega_b = w[0];
            } else {
                double t = (1.0 - smag[i - 1]) / (smag[i] - smag[i - 1]);
                rep.omega_b = std::exp(std::log(w[i - 1]) + t * (std::log(w[i]) - std::log(w[i - 1])));
            }
            break;
        }
    }

    // Rolloff corner: smallest grid w_i with |L(w_j)| <= 0.5*(w_i/w_j)^2 for all
    // j >= i, via a suffix maximum of |L|*w^2.
    std::vector<double> suffix(n);
    double run = 0.0;
    for (size_t j = n; j-- > 0;) {
        run = std::max(run, mag[j] * w[j] * w[j]);
        suffix[j] = run;
    }
    rep.omega_t = w.back();
    for (size_t i = 0; i < n; ++i) {
        if (suffix[i] <= 0.5 * w[i] * w[i]) {
            rep.omega_t = w[i];
            break;
        }
    }
    return rep;
}

namespace {

// Adaptive Simpson on [a, b] with absolute tolerance.
template <typename F>
double adaptive_simpson(F f, double a, double b, double fa, double fm, double fb, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F f, double a, double b, double tol) {
    double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 30);
}

}  // namespace

BodeAudit bode_integral_audit(const RatFun& s_tilde, const RatFun& open_loop, const FreqGrid& grid) {
    if (open_loop.relative_degree() < 2)
        fail(Errc::invalid_argument, "bode_integral_audit: Bode integral prerequisites unmet "
                                     "(loop relative degree < 2)");
    if (!is_hurwitz(s_tilde).hurwitz)
        fail(Errc::invalid_argument, "bode_integral_audit: Bode integral prerequisites unmet "
                                     "(sensitivity not Hurwitz)");

    BodeAudit audit;
    audit.metrics = loop_metrics(open_loop, grid);
    const double wB = audit.metrics.omega_b, wT = audit.metrics.omega_t;
    const double w_hi = 100.0 * wT;

    auto lnS = [&](double w) { return std::log(std::abs(freq_eval(s_tilde, std::max(w, 1e-12)))); };
    auto lnS_abs = [&](double w) { return std::abs(lnS(w)); };

    // Piecewise quadrature on log-spaced segments; near-zero head handled with
    // the origin-zero asymptote ln|S| ~ k*ln(w) + ln(c).
    const double w_lo = 1e-4;
    int k0 = s_tilde.origin_zeros();
    double head = 0.0, head_abs = 0.0;
    if (k0 > 0) {
        double c = std::abs(freq_eval(s_tilde, w_lo)) / std::pow(w_lo, k0);
        // int_0^w (k ln w + ln c) dw = w*(k*(ln w - 1) + ln c)
        head = w_lo * (k0 * (std::log(w_lo) - 1.0) + std::log(c));
        head_abs = std::abs(head);
    }

    double total = head, total_abs = head_abs, low = (wB > w_lo) ? head : 0.0;
    const double seg_tol = 1e-5 * wT;
    double a = w_lo;
    while (a < w_hi) {
        double b = std::min(a * 2.0, w_hi);
        total += integrate(lnS, a, b, seg_tol);
        total_abs += integrate(lnS_abs, a, b, seg_tol);
        if (b <= wB)
            low += integrate(lnS, a, b, seg_tol);
        else if (a < wB)
            low += integrate(lnS, a, wB, seg_tol);
        a = b;
    }
    // Analytic tail: L ~ c2/(jw)^2 beyond w_hi, so ln|S| ~ -Re(L) = c2/w^2.
    double c2 = open_loop.num().leading() / open_loop.den().leading();
    double tail = c2 / w_hi;
    total += tail;
    total_abs += std::abs(tail);

    audit.integral = total;
    audit.integral_abs = total_abs;
    audit.low_band = std::abs(low);
    audit.lhs = (audit.low_band - 0.75 * wT) / (wT - wB);
    audit.ln_ms = std::log(audit.metrics.ms);
    audit.pass = audit.lhs <= audit.ln_ms + 1e-6 &&
                 std::abs(audit.integral) <= 0.02 * audit.integral_abs;
    return audit;
}

}  // namespace egfl
