#pragma once

#include <optional>
#include <string>

#include "egfl/sim.hpp"

namespace egfl {

/// Resolved tool configuration. Field names in the JSON schema carry explicit
/// SI units (L_henry, omega_d_rad_per_s, ...); see the README for the full
/// schema.
struct Config {
    LineParams line;
    InverterParams inverter;
    DesignParams design;
    std::vector<AuxCompensator> aux;
    double tau_i = 1e-4;

    std::optional<UncertaintyBox> box;
    double omega_bw = 0.0;          // 0 -> defaults to design.omega_d
    bool use_nominal_design = false;  // design against the box's nominal plant

    std::optional<ScenarioConfig> scenario;

    /// Line the controllers are designed against (nominal plant when
    /// use_nominal_design is set).
    LineParams design_line() const;
    /// Fully resolved scenario (controller design line, plant line, grid).
    ScenarioConfig resolved_scenario() const;
};

Config parse_config(const std::string& json_text);

}  // namespace egfl
