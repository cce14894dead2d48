#include <doctest.h>

#include <cmath>

#include "egfl/error.hpp"
#include "egfl/loop.hpp"

using namespace egfl;

namespace {
const double w60 = 2.0 * M_PI * 60.0;
LineParams table1_sim() { return LineParams::make(1e-3, 1e-3, w60); }
DesignParams default_design() {
    DesignParams d;
    d.alpha_d = 0.4;
    d.omega_d = 2.0 * M_PI * 300.0;
    d.alpha_q = 0.5;
    d.omega_q = 2.0 * M_PI * 240.0;
    d.alpha_theta = 0.1;
    d.omega_theta = 2.0 * M_PI * 10.0;
    return d;
}
}  // namespace

TEST_CASE("siso sensitivity basics") {
    LineParams line = table1_sim();
    RatFun gl = gl_siso(line);
    CHECK(std::abs(freq_eval(siso_sensitivity(gl, RatFun()), 10.0)) == doctest::Approx(1.0));

    RatFun kd = design_kd(line, 0.4, 2.0 * M_PI * 300.0);
    RatFun s = siso_sensitivity(gl, kd);
    CHECK(s.origin_zeros() >= 1);  // integral action -> S(0) = 0

    // closed-form oracle at the design crossover: |K| = L*sqrt(wd^2+l^2),
    // phases -90 + lead + arg(jwd+l) - arg(den)
    double wd = 2.0 * M_PI * 300.0, l = line.lambda, L = line.L;
    Complex Kw = std::polar(L * std::hypot(wd, l),
                            -M_PI / 2.0 + std::atan(1.0 / 0.4) - std::atan(0.4) +
                                0.0);  // lead at center: atan(1/a) - atan(a)
    Complex Gw = Complex(l, wd) / L / Complex(l * l + line.omega0 * line.omega0 - wd * wd, 2.0 * l * wd);
    double oracle = 1.0 / std::abs(1.0 + Kw * Gw);
    double near_crossover = std::abs(freq_eval(s, wd));
    CHECK(near_crossover == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(near_crossover > 0.5);
    CHECK(near_crossover < 1.3);
}

TEST_CASE("closed-loop set identities and shapes") {
    LineParams line = table1_sim();
    ControllerSet set = build_controller_set(line, default_design(), {});
    SensitivitySet ss = closed_loop_set(gl_siso(line), set);

    // T_theta is a unity-dc-gain low pass
    CHECK(std::abs(freq_eval(ss.t_theta, 1e-10)) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(freq_eval(ss.t_theta, 1e5)) < 1e-3);
    // T_v is a band pass: zero at dc, rolls off at infinity
    CHECK(std::abs(freq_eval(ss.t_v, 1e-10)) < 1e-7);
    CHECK(std::abs(freq_eval(ss.t_v, 1e6)) < 1e-2);
    CHECK(std::abs(freq_eval(ss.t_v, default_design().omega_q * 0.2)) > 0.5);
    // S_q has at least two origin zeros
    CHECK(ss.s_q.origin_zeros() >= 2);

    // numerics on the grid
    FreqGrid grid = FreqGrid::log_spaced(1e-1, 1e6, 500);
    for (double w : grid.omegas()) {
        Complex sum = freq_eval(ss.s_q, w) + freq_eval(ss.t_q, w);
        CHECK(std::abs(sum - 1.0) <= 1e-10);
        Complex split = freq_eval(ss.t_theta, w) + freq_eval(ss.t_v, w) - freq_eval(ss.t_q, w);
        CHECK(std::abs(split) <= 1e-10 * std::max(1.0, std::abs(freq_eval(ss.t_q, w))));
    }
}

TEST_CASE("nominal stability verdicts") {
    LineParams line = table1_sim();
    FreqGrid grid = FreqGrid::log_spaced(1e-1, 1e6, 800);

    // open loop fails the decoupling condition near w0
    SensitivitySet ss_open;
    ss_open.s_d = RatFun::one();
    ss_open.s_q = RatFun::one();
    StabilityVerdict open_v = check_nominal_stability(ss_open, line, grid);
    CHECK_FALSE(open_v.pass);
    CHECK(open_v.eps_max > 100.0);  // ~ w0/lambda at resonance

    // the designed controllers pass
    ControllerSet set = build_controller_set(line, default_design(), {});
    SensitivitySet ss = closed_loop_set(gl_siso(line), set);
    StabilityVerdict v = check_nominal_stability(ss, line, grid);
    CHECK(v.s_d_hurwitz);
    CHECK(v.s_q_hurwitz);
    CHECK(v.eps_max < 1.0);
    CHECK(v.pass);

    // an unstable design fails condition (a)
    SensitivitySet ss_bad = ss;
    RatFun bad_kd = RatFun::from_factors(-5e3, {Polynomial::linear(10.0)},
                                         {Polynomial::s(), Polynomial::linear(1000.0)});
    ss_bad.s_d = siso_sensitivity(gl_siso(line), bad_kd);
    CHECK_FALSE(check_nominal_stability(ss_bad, line, grid).pass);
}

TEST_CASE("coupling perturbation bound") {
    LineParams line = table1_sim();
    ControllerSet set = build_controller_set(line, default_design(), {});
    SensitivitySet ss = closed_loop_set(gl_siso(line), set);
    FreqGrid grid = FreqGrid::log_spaced(1e-1, 1e6, 400);
    auto pts = coupling_perturbation(ss, line, grid);  // postcondition asserted inside
    REQUIRE(pts.size() == grid.size());
    int applicable = 0;
    for (const auto& p : pts)
        if (p.applicable) {
            ++applicable;
            CHECK(p.xc_gap <= p.bound * (1.0 + 1e-9) + 1e-12);
        }
    CHECK(applicable > 300);
}

TEST_CASE("robust stability report") {
    double wbw = 2.0 * M_PI * 300.0;
    UncertaintyBox box = UncertaintyBox::make(1e-3, 3e-3, 1e-3, 0.2);
    NominalPlant nom = nominal_plant(box, w60);
    FreqGrid grid = FreqGrid::log_spaced(1e-1, 1e6, 600);

    // near-zero gains: S0 ~ 1 everywhere, must fail
    ControllerSet weak = build_controller_set(nom.line, default_design(), {});
    weak.kd = weak.kd.scaled(1e-9);
    weak.k1q = weak.k1q.scaled(1e-9);
    weak.k2q = weak.k2q.scaled(1e-9);
    RSReport weak_rep = check_robust_stability(nom, weak, box, wbw, grid);
    CHECK_FALSE(weak_rep.pass);

    // point box: ceiling1 = inf, reduces to the nominal conditions
    UncertaintyBox pt = UncertaintyBox::make(1.5e-3, 1.5e-3, 0.225, 0.225);
    NominalPlant npt = nominal_plant(pt, w60);
    ControllerSet set = build_controller_set(npt.line, default_design(), {});
    RSReport rpt = check_robust_stability(npt, set, pt, wbw, grid);
    for (const auto& c : rpt.curve) CHECK(std::isinf(c.ceiling1));

    // RS monotonicity: widening the R interval around the same nominal never
    // turns fail into pass. The big box widens (Rmin, Rmax) along the
    // direction that keeps lambda0 and L0 fixed.
    UncertaintyBox small_box = UncertaintyBox::make(1.3e-3, 1.7e-3, 0.2, 0.25);
    NominalPlant nsm = nominal_plant(small_box, w60);
    ControllerSet sset = build_controller_set(nsm.line, default_design(), {});
    RSReport small_rep = check_robust_stability(nsm, sset, small_box, wbw, grid);
    double dmax = 0.1, ratio = (1.7 / 1.3) * (1.7 / 1.3);
    UncertaintyBox big_box = UncertaintyBox::make(1.3e-3, 1.7e-3, 0.2 - dmax * ratio, 0.25 + dmax);
    NominalPlant nbig = nominal_plant(big_box, w60);
    CHECK(nbig.lambda0 == doctest::Approx(nsm.lambda0).epsilon(1e-12));
    RSReport big_rep = check_robust_stability(nsm, sset, big_box, wbw, grid);
    if (!small_rep.pass) CHECK_FALSE(big_rep.pass);
    CHECK(big_rep.worst_margin >= small_rep.worst_margin * 0.999);
}

TEST_CASE("loop metrics of a first-order loop") {
    // oracle: L = wc/s has Ms = 1, PM = 90 deg, crossover wc
    double wc = 100.0;
    RatFun loop = RatFun::from_factors(wc, {}, {Polynomial::s()});
    FreqGrid grid = FreqGrid::log_spaced(1e-1, 1e6, 2000);
    LoopReport rep = loop_metrics(loop, grid);
    CHECK(rep.ms == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(rep.pm_deg == doctest::Approx(90.0).epsilon(1e-3));
    CHECK(rep.crossover == doctest::Approx(wc).epsilon(1e-3));
    CHECK(std::isinf(rep.gm));  // phase never reaches -180

    // paper's sufficiency thresholds at Ms = 2
    double pm_bound = 2.0 * std::asin(1.0 / 4.0) * 180.0 / M_PI;
    CHECK(pm_bound == doctest::Approx(28.96).epsilon(1e-3));
}

TEST_CASE("loop metrics of the designed axes") {
    LineParams line = table1_sim();
    DesignParams dp = default_design();
    ControllerSet set = build_controller_set(line, dp, {});
    RatFun loop = set.kd * gl_siso(line);
    FreqGrid grid = FreqGrid::standard();
    LoopReport rep = loop_metrics(loop, grid);
    CHECK(rep.omega_b <= rep.crossover * 1.001);
    CHECK(rep.crossover <= rep.omega_t * 1.001);
    CHECK(rep.crossover == doctest::Approx(dp.omega_d).epsilon(0.15));
    CHECK(rep.ms >= 1.0);

    // measured PM tracks the closed-form prediction within 5 degrees
    PmPrediction pred = predicted_pm(dp, line, Axis::d);
    CHECK(std::abs(rep.pm_deg - pred.pm_deg) < 5.0);

    RatFun kq = set.k1q + set.k2q;
    LoopReport rq = loop_metrics(kq * gl_siso(line), grid);
    PmPrediction predq = predicted_pm(dp, line, Axis::q);
    CHECK(std::abs(rq.pm_deg - predq.pm_deg) < 5.0);
}

TEST_CASE("bode integral audit of the designed loops") {
    LineParams line = table1_sim();
    ControllerSet set = build_controller_set(line, default_design(), {});
    SensitivitySet ss = closed_loop_set(gl_siso(line), set);
    FreqGrid grid = FreqGrid::standard();

    BodeAudit a = bode_integral_audit(ss.s_d, set.kd * gl_siso(line), grid);
    CHECK(a.pass);
    CHECK(std::abs(a.integral) <= 0.02 * a.integral_abs);
    CHECK(a.lhs <= a.ln_ms + 1e-6);

    // adding a high-gain PR raises both the low-band integral and Ms
    // (narrow damping keeps the skirt clear of the crossover)
    AuxCompensator pr;
    pr.kind = AuxKind::pr;
    pr.gain = 200.0;
    pr.damping = 5e-4;
    pr.order = 3;
    ControllerSet pset = build_controller_set(line, default_design(), {pr});
    SensitivitySet pss = closed_loop_set(gl_siso(line), pset);
    BodeAudit ap = bode_integral_audit(pss.s_d, pset.kd * gl_siso(line), grid);
    CHECK(ap.metrics.ms > a.metrics.ms);
    CHECK(ap.low_band > a.low_band);

    // prerequisite: relative degree >= 2
    RatFun shallow = RatFun::from_factors(10.0, {}, {Polynomial::linear(1.0)});
    CHECK_THROWS_AS(bode_integral_audit(siso_sensitivity(RatFun::one(), shallow), shallow, grid),
                    Error);
}
