#include "egfl/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <ostream>
#include <random>

#include "egfl/error.hpp"

namespace egfl {

using nlohmann::json;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

json ratfun_json(const RatFun& r) {
    return json{{"num", r.num().coeffs()}, {"den", r.den().coeffs()}};
}

json loop_json(const LoopReport& r) {
    return json{{"ms", r.ms},
                {"ms_omega_rad_per_s", r.ms_omega},
                {"pm_deg", r.pm_deg},
                {"gm", r.gm},
                {"crossover_rad_per_s", r.crossover},
                {"omega_b_rad_per_s", r.omega_b},
                {"omega_t_rad_per_s", r.omega_t},
                {"pm_bound_from_ms_deg", r.pm_bound_deg},
                {"gm_bound_from_ms", r.gm_bound}};
}

json bode_json(const BodeAudit& b) {
    return json{{"integral", b.integral}, {"integral_abs", b.integral_abs},
                {"low_band", b.low_band}, {"lhs", b.lhs},
                {"ln_ms", b.ln_ms},       {"pass", b.pass}};
}

}  // namespace

AnalysisBundle run_analysis(const Config& cfg, const AnalysisOptions& opt) {
    AnalysisBundle b;
    LineParams dline = cfg.design_line();
    b.set = build_controller_set(dline, cfg.design, cfg.aux);
    // Analysis plant: the design line (nominal when a box is in play).
    RatFun gl = gl_siso(dline);
    b.sens = closed_loop_set(gl, b.set);
    FreqGrid grid = FreqGrid::log_spaced(1e-1, 1e6, opt.grid_points);

    b.nominal = check_nominal_stability(b.sens, dline, grid);
    b.sync = check_synchronization(b.set);
    RatFun kq = b.set.k1q + b.set.k2q;
    b.loop_d = loop_metrics(b.set.kd * gl, grid);
    b.loop_q = loop_metrics(kq * gl, grid);
    b.loop_theta = loop_metrics(b.set.k2q * gl, grid);
    b.bode_d = bode_integral_audit(b.sens.s_d, b.set.kd * gl, grid);
    b.bode_q = bode_integral_audit(b.sens.s_q, kq * gl, grid);

    auto coupling = coupling_perturbation(b.sens, dline, grid);
    b.has_box = cfg.box.has_value();
    if (b.has_box) {
        NominalPlant nom = nominal_plant(*cfg.box, cfg.line.omega0);
        b.rs = check_robust_stability(nom, b.set, *cfg.box, cfg.omega_bw, grid);
    }

    b.rows.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        AnalysisRow& r = b.rows[i];
        double w = grid[i];
        r.omega = w;
        r.s_d = std::abs(freq_eval(b.sens.s_d, w));
        r.s_q = std::abs(freq_eval(b.sens.s_q, w));
        r.t_d = std::abs(freq_eval(b.sens.t_d, w));
        r.t_q = std::abs(freq_eval(b.sens.t_q, w));
        r.t_theta = std::abs(freq_eval(b.sens.t_theta, w));
        r.t_v = std::abs(freq_eval(b.sens.t_v, w));
        r.eps = coupling[i].eps;
        r.xc_gap = coupling[i].xc_gap;
        r.xc_bound = coupling[i].bound;
        r.dec_bound = decoupling_bound(dline, w);
        if (b.rs) {
            r.rs_ceiling1 = b.rs->curve[i].ceiling1;
            r.rs_ceiling2 = b.rs->curve[i].ceiling2;
            r.rs_margin = b.rs->curve[i].margin;
        }
    }

    // Algebraic identity residuals on the grid.
    for (size_t i = 0; i < grid.size(); ++i) {
        double w = grid[i];
        Complex sum_d = freq_eval(b.sens.s_d, w) + freq_eval(b.sens.t_d, w);
        Complex sum_q = freq_eval(b.sens.s_q, w) + freq_eval(b.sens.t_q, w);
        b.identity_sum_err = std::max({b.identity_sum_err, std::abs(sum_d - 1.0), std::abs(sum_q - 1.0)});
        Complex tq = freq_eval(b.sens.t_q, w);
        Complex split = freq_eval(b.sens.t_theta, w) + freq_eval(b.sens.t_v, w) - tq;
        b.identity_split_err = std::max(b.identity_split_err, std::abs(split) / std::max(1e-30, std::abs(tq)));
    }

    // Factored sensitivity vs direct MIMO inversion at random grid points.
    TF2 glm = gl_mimo(dline);
    TF2 gmm = gamma(dline);
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<size_t> pick(0, grid.size() - 1);
    for (int k = 0; k < opt.random_checks; ++k) {
        double w = grid[pick(rng)];
        Complex kd = freq_eval(b.set.kd, w), kqv = freq_eval(kq, w);
        Mat2 glw = glm.eval(w);
        Mat2 ikg = Mat2::identity();
        ikg.e[0][0] += glw.e[0][0] * kd;
        ikg.e[0][1] += glw.e[0][1] * kqv;
        ikg.e[1][0] += glw.e[1][0] * kd;
        ikg.e[1][1] += glw.e[1][1] * kqv;
        Mat2 direct = ikg.inverse();

        Complex sd = freq_eval(b.sens.s_d, w), sq = freq_eval(b.sens.s_q, w);
        Mat2 gw = gmm.eval(w);
        Mat2 i2 = Mat2::identity();
        Mat2 mm = i2;
        mm.e[0][0] += (gw.e[0][0] - 1.0) * sd;
        mm.e[0][1] += gw.e[0][1] * sq;
        mm.e[1][0] += gw.e[1][0] * sd;
        mm.e[1][1] += (gw.e[1][1] - 1.0) * sq;
        Mat2 xc = mm.inverse();
        Mat2 fact = xc * gw;
        fact.e[0][0] *= sd;
        fact.e[0][1] *= sd;
        fact.e[1][0] *= sq;
        fact.e[1][1] *= sq;

        double scale = std::max({std::abs(direct.e[0][0]), std::abs(direct.e[0][1]),
                                 std::abs(direct.e[1][0]), std::abs(direct.e[1][1]), 1e-30});
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                b.factored_sens_err =
                    std::max(b.factored_sens_err, std::abs(fact.e[r][c] - direct.e[r][c]) / scale);
    }
    return b;
}

void AnalysisBundle::write_csv(std::ostream& os) const {
    os << "omega_rad_per_s,s_d_mag,s_q_mag,t_d_mag,t_q_mag,t_theta_mag,t_v_mag,"
          "eps,xc_gap,xc_bound,decoupling_bound,rs_ceiling1,rs_ceiling2,rs_margin\n";
    char buf[64];
    auto put = [&](double v, bool last = false) {
        if (std::isinf(v))
            os << (v > 0 ? "inf" : "-inf");
        else {
            std::snprintf(buf, sizeof(buf), "%.9g", v);
            os << buf;
        }
        if (!last) os << ",";
    };
    for (const auto& r : rows) {
        put(r.omega);
        put(r.s_d);
        put(r.s_q);
        put(r.t_d);
        put(r.t_q);
        put(r.t_theta);
        put(r.t_v);
        put(r.eps);
        put(r.xc_gap);
        put(r.xc_bound);
        put(r.dec_bound);
        if (has_box) {
            put(r.rs_ceiling1);
            put(r.rs_ceiling2);
            put(r.rs_margin, true);
        } else {
            os << ",,";
        }
        os << "\n";
    }
}

std::string AnalysisBundle::summary_json() const {
    json j;
    j["nominal_stability"] = {{"pass", nominal.pass},
                              {"s_d_hurwitz", nominal.s_d_hurwitz},
                              {"s_q_hurwitz", nominal.s_q_hurwitz},
                              {"eps_max", nominal.eps_max},
                              {"eps_max_omega_rad_per_s", nominal.eps_max_omega}};
    j["synchronization"] = {{"pass", sync.pass},
                            {"kd_origin_poles", sync.kd_origin_poles},
                            {"kq_origin_poles", sync.kq_origin_poles},
                            {"ratio_origin_zeros", sync.ratio_origin_zeros}};
    j["loop_d"] = loop_json(loop_d);
    j["loop_q"] = loop_json(loop_q);
    j["loop_theta"] = loop_json(loop_theta);
    j["bode_d"] = bode_json(bode_d);
    j["bode_q"] = bode_json(bode_q);
    j["identities"] = {{"sum_err", identity_sum_err},
                       {"split_err", identity_split_err},
                       {"factored_sens_err", factored_sens_err}};
    if (rs) {
        j["robust_stability"] = {{"pass", rs->pass},
                                 {"worst_margin", rs->worst_margin},
                                 {"binding_omega_rad_per_s", rs->binding_omega},
                                 {"w1_cover_margin", rs->weights.w1_cover_margin},
                                 {"w2_cover_margin", rs->weights.w2_cover_margin},
                                 {"w2_covers_lambda_min", rs->weights.w2_covers_lambda_min}};
    }
    bool all = nominal.pass && sync.pass && bode_d.pass && bode_q.pass && (!rs || rs->pass);
    j["pass"] = all;
    return j.dump(2);
}

std::string design_report_json(const Config& cfg) {
    LineParams dline = cfg.design_line();
    ControllerSet set = build_controller_set(dline, cfg.design, cfg.aux);
    CascadeRealization casc =
        realize_cascade(set, cfg.inverter, dline, cfg.design, cfg.tau_i, cfg.inverter.v0);
    SyncVerdict sync = check_synchronization(set);
    PmPrediction pmd = predicted_pm(cfg.design, dline, Axis::d);
    PmPrediction pmq = predicted_pm(cfg.design, dline, Axis::q);

    json j;
    j["design_line"] = {{"L_henry", dline.L},
                        {"R_ohm", dline.R},
                        {"lambda_per_s", dline.lambda},
                        {"omega0_rad_per_s", dline.omega0}};
    j["controllers"] = {{"kd", ratfun_json(set.kd)},
                        {"k1q", ratfun_json(set.k1q)},
                        {"k2q", ratfun_json(set.k2q)}};
    j["cascade"] = {{"ki", ratfun_json(casc.ki)},       {"kv_d", ratfun_json(casc.kv_d)},
                    {"kv_q", ratfun_json(casc.kv_q)},   {"kc_d", ratfun_json(casc.kc_d)},
                    {"kc_q", ratfun_json(casc.kc_q)},   {"dw_filter", ratfun_json(casc.dw_filter)},
                    {"tau_i_s", casc.tau_i}};
    j["predicted_pm"] = {{"d_deg", pmd.pm_deg},
                         {"d_in_validity_range", pmd.in_validity_range},
                         {"q_deg", pmq.pm_deg},
                         {"q_in_validity_range", pmq.in_validity_range}};
    j["synchronization"] = {{"pass", sync.pass},
                            {"kd_origin_poles", sync.kd_origin_poles},
                            {"kq_origin_poles", sync.kq_origin_poles},
                            {"ratio_origin_zeros", sync.ratio_origin_zeros}};
    if (cfg.box) {
        NominalPlant nom = nominal_plant(*cfg.box, cfg.line.omega0);
        j["nominal_plant"] = {{"L0_henry", nom.L0},
                              {"lambda0_per_s", nom.lambda0},
                              {"R0_ohm", nom.L0 * nom.lambda0}};
    }
    j["pass"] = sync.pass;
    return j.dump(2);
}

}  // namespace egfl
