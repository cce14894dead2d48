#pragma once

#include <cstdint>
#include <iosfwd>

#include "egfl/config.hpp"
#include "egfl/loop.hpp"

namespace egfl {

struct AnalysisOptions {
    int grid_points = 2000;
    uint64_t seed = 0xE6F1D5EEDULL;
    int random_checks = 100;
};

struct AnalysisRow {
    double omega = 0.0;
    double s_d = 0.0, s_q = 0.0, t_d = 0.0, t_q = 0.0, t_theta = 0.0, t_v = 0.0;
    double eps = 0.0, xc_gap = 0.0, xc_bound = 0.0;
    double dec_bound = 0.0;  // decoupling ceiling of the analyzed line
    double rs_ceiling1 = 0.0, rs_ceiling2 = 0.0, rs_margin = 0.0;  // only with a box
};

/// Everything cmd_analyze reports: per-frequency curves, loop metrics, the
/// stability/robustness verdicts, and the algebraic-identity residuals that
/// double as self-tests of the rational arithmetic.
struct AnalysisBundle {
    ControllerSet set;
    SensitivitySet sens;
    StabilityVerdict nominal;
    SyncVerdict sync;
    LoopReport loop_d, loop_q, loop_theta;
    BodeAudit bode_d, bode_q;
    std::optional<RSReport> rs;
    std::vector<AnalysisRow> rows;

    double identity_sum_err = 0.0;      // max |S+T-1| on the grid
    double identity_split_err = 0.0;    // max rel |T_q - T_theta - T_v|
    double factored_sens_err = 0.0;     // max rel entrywise S_factored vs direct
    bool has_box = false;

    void write_csv(std::ostream& os) const;
    std::string summary_json() const;
};

AnalysisBundle run_analysis(const Config& cfg, const AnalysisOptions& opt);

/// Structured design report (controller and cascade coefficients, predicted
/// margins, synchronization verdict) as a JSON string.
std::string design_report_json(const Config& cfg);

}  // namespace egfl
