#include <doctest.h>

#include <cmath>

#include "egfl/design.hpp"
#include "egfl/error.hpp"

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
InverterParams table1_inverter() {
    InverterParams p;
    p.Li = 1e-3;
    p.Ci = 50e-6;
    p.Ri = 0.05;
    p.vdc = 450.0;
    p.fs = p.fsw = 20e3;
    p.v0 = 120.0 * std::sqrt(2.0);
    return p;
}
}  // namespace

TEST_CASE("K^d structure and crossover placement") {
    LineParams line = table1_sim();
    double wd = 2.0 * M_PI * 300.0;
    RatFun kd = design_kd(line, 0.4, wd);
    CHECK(kd.origin_poles() == 1);

    // alpha_d = 1 collapses the lead
    RatFun flat = design_kd(line, 1.0, wd);
    double expect = line.L * wd * std::hypot(wd, line.lambda);
    CHECK(std::abs(freq_eval(flat, 10.0)) == doctest::Approx(expect / 10.0).epsilon(1e-9));

    // |K^d G| within 15% of unity at the design crossover
    double mag = std::abs(freq_eval(kd * gl_siso(line), wd));
    CHECK(mag > 0.85);
    CHECK(mag < 1.15);
}

TEST_CASE("K1^q structure") {
    LineParams line = table1_sim();
    double wq = 2.0 * M_PI * 240.0, wt = 2.0 * M_PI * 10.0;
    RatFun k1q = design_k1q(line, 0.5, wq, wt);
    CHECK(k1q.origin_zeros() == 1);
    CHECK(k1q.origin_poles() == 0);
    CHECK(std::abs(freq_eval(k1q, 1e-12)) < 1e-9);  // K1q(0) = 0
    double mag = std::abs(freq_eval(k1q * gl_siso(line), wq));
    CHECK(mag > 0.85);
    CHECK(mag < 1.15);
}

TEST_CASE("K2^q cancels the plant poles exactly") {
    LineParams line = table1_sim();
    double wt = 2.0 * M_PI * 10.0, at = 0.5;
    RatFun k2q = design_k2q(line, at, wt);
    CHECK(k2q.origin_poles() == 2);

    RatFun shaped = k2q * gl_siso(line);
    // printed form: wt^2/(at s^2) * (s + at wt)/(s + wt/at)
    RatFun expect = RatFun::from_factors(
        wt * wt / at, {Polynomial::linear(at * wt)},
        {Polynomial::s(), Polynomial::s(), Polynomial::linear(wt / at)});
    CHECK(shaped.num().almost_equal(expect.num(), 1e-12));
    CHECK(shaped.den().almost_equal(expect.den(), 1e-12));

    // K1q/K2q carries three origin zeros for this pair
    RatFun k1q = design_k1q(line, 0.5, 2.0 * M_PI * 240.0, wt);
    CHECK((k1q / k2q).origin_zeros() == 3);
}

TEST_CASE("PR compensator resonance and dc transparency") {
    double k = 100.0;
    RatFun pr = pr_compensator(k, 0.05, 3, w60);
    CHECK(std::abs(freq_eval(pr, 3.0 * w60)) == doctest::Approx(1.0 + k).epsilon(1e-9));
    CHECK(std::abs(freq_eval(pr, 1e-12)) == doctest::Approx(1.0).epsilon(1e-12));
    RatFun unity = pr_compensator(0.0, 0.05, 2, w60);
    for (double w : {1.0, 100.0, 1000.0})
        CHECK(std::abs(freq_eval(unity, w)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lead peak phase and notch shape") {
    double alpha = 0.4, wr = 1000.0;
    RatFun ld = lead(alpha, wr);
    double expect_deg = std::asin((1 - alpha * alpha) / (1 + alpha * alpha)) * 180.0 / M_PI;
    CHECK(expect_deg == doctest::Approx(46.4).epsilon(1e-3));
    double got = std::arg(freq_eval(ld, wr)) * 180.0 / M_PI;
    CHECK(got == doctest::Approx(expect_deg).epsilon(1e-9));
    // dc gain alpha^2
    CHECK(std::abs(freq_eval(ld, 1e-9)) == doctest::Approx(alpha * alpha).epsilon(1e-9));

    RatFun nt = notch(754.0, 0.7);
    CHECK(std::abs(freq_eval(nt, 754.0)) < 1e-12);
    CHECK(std::abs(freq_eval(nt, 1e-9)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("predicted phase margins") {
    LineParams line = table1_sim();
    DesignParams dp = default_design();
    PmPrediction d = predicted_pm(dp, line, Axis::d);
    // 90 + asin(0.7241) - atan(1885/1) = 90 + 46.43 - 89.97
    CHECK(d.pm_deg == doctest::Approx(46.4).epsilon(0.01));
    CHECK(d.in_validity_range);

    dp.alpha_q = 1.0;
    CHECK(predicted_pm(dp, line, Axis::q).pm_deg == doctest::Approx(0.0));

    DesignParams low = default_design();
    low.omega_d = 2.0 * M_PI * 50.0;
    CHECK_FALSE(predicted_pm(low, line, Axis::d).in_validity_range);
}

TEST_CASE("inner loop identity") {
    InverterParams inv = table1_inverter();
    double tau = 1e-4;
    InnerLoop il = inner_loop(inv, tau);
    CHECK(std::abs(freq_eval(il.ti, 1e-9)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(freq_eval(il.si, 1e-9)) < 1e-8);
    CHECK(std::abs(freq_eval(il.ti, 1.0 / tau)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));

    // Gi*Ki/(1 + Gi*Ki) coefficient-equal to 1/(tau s + 1)
    RatFun gi(Polynomial{1.0}, Polynomial{inv.Ri, inv.Li});
    RatFun closed = (gi * il.ki) / (RatFun::one() + gi * il.ki);
    CHECK(closed.num().almost_equal(il.ti.num(), 1e-12));
    CHECK(closed.den().almost_equal(il.ti.den(), 1e-12));
    // T + S = 1 exactly after normalization
    RatFun sum = il.ti + il.si;
    CHECK(sum.num().degree() == 0);
    CHECK(sum.num()[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cascade realization closed forms and reconstruction") {
    LineParams line = table1_sim();
    InverterParams inv = table1_inverter();
    DesignParams dp = default_design();
    ControllerSet set = build_controller_set(line, dp, {});
    double tau = 1e-4;
    CascadeRealization cr = realize_cascade(set, inv, line, dp, tau, inv.v0);

    // hand value: wd*sqrt(wd^2+l^2)/(0.4 * 2e7) with w_LC^2 = 1/(L*Ci) = 2e7
    double wd = dp.omega_d;
    double expect = wd * std::hypot(wd, line.lambda) / (0.4 * 2e7);
    CHECK(expect == doctest::Approx(0.444).epsilon(1e-3));
    CHECK(std::abs(freq_eval(cr.kc_d, 100.0)) == doctest::Approx(expect).epsilon(1e-9));

    // alpha_d = 1 kills the d voltage compensator
    DesignParams flat = dp;
    flat.alpha_d = 1.0;
    ControllerSet fset = build_controller_set(line, flat, {});
    CascadeRealization fcr = realize_cascade(fset, inv, line, flat, tau, inv.v0);
    CHECK(fcr.kv_d.is_zero());

    // reconstruction stays within 5% up to 1/(10 tau); spot-check directly
    InnerLoop il = inner_loop(inv, tau);
    RatFun gv(Polynomial{1.0}, Polynomial{0.0, inv.Ci});
    RatFun sv = (RatFun::one() + gv * il.ti * cr.kv_d).inverse();
    RatFun khat = gv * il.ti * sv * cr.kc_d;
    for (double w : {1.0, 50.0, 700.0, 1.0 / (10.0 * tau)}) {
        double ratio = std::abs(freq_eval(khat, w)) / std::abs(freq_eval(set.kd, w));
        CHECK(ratio > 0.95);
        CHECK(ratio < 1.05);
    }
}

TEST_CASE("aux compensators preserve the synchronization counts") {
    LineParams line = table1_sim();
    DesignParams dp = default_design();
    AuxCompensator pr;
    pr.kind = AuxKind::pr;
    pr.gain = 100.0;
    pr.damping = 0.05;
    pr.order = 3;
    AuxCompensator nt;
    nt.kind = AuxKind::notch;
    nt.omega_n = 2.0 * w60;
    nt.xi_n = 0.7;
    ControllerSet set = build_controller_set(line, dp, {pr, nt});
    SyncVerdict v = check_synchronization(set);
    CHECK(v.pass);
    CHECK(v.kd_origin_poles == 1);
    CHECK(v.kq_origin_poles == 2);
    CHECK(v.ratio_origin_zeros >= 2);
}

TEST_CASE("synchronization failure cases") {
    LineParams line = table1_sim();
    DesignParams dp = default_design();
    ControllerSet set = build_controller_set(line, dp, {});
    // single-integrator K2q violates the two-pole requirement
    set.k2q = RatFun::from_factors(100.0, {}, {Polynomial::s()});
    CHECK_FALSE(check_synchronization(set).pass);

    // boundary case: K1q with dc gain, K2q ~ 1/s^2 -> ratio has 2 origin zeros
    ControllerSet b = build_controller_set(line, dp, {});
    b.k1q = RatFun::constant(3.0);
    b.k2q = RatFun::from_factors(5.0, {}, {Polynomial::s(), Polynomial::s()});
    CHECK(check_synchronization(b).ratio_origin_zeros == 2);
}

TEST_CASE("delay phase") {
    CHECK(delay_phase(20e3, 2.0 * M_PI * 300.0) == doctest::Approx(-0.1414).epsilon(1e-3));
    CHECK(delay_phase(20e3, 0.0) == 0.0);
    CHECK(delay_phase(20e3, 2.0 * M_PI * 20e3 / 3.0) == doctest::Approx(-M_PI).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
    LineParams line = table1_sim();
    CHECK_THROWS_AS(design_kd(line, 1.5, 100.0), Error);
    DesignParams bad = default_design();
    bad.omega_theta = bad.omega_q * 2.0;  // violates the band-pass ordering
    CHECK_THROWS_AS(bad.validate(), Error);
}
