#pragma once

#include <optional>
#include <string>
#include <vector>

#include "egfl/design.hpp"
#include "egfl/discrete.hpp"
#include "egfl/plant.hpp"

namespace egfl {

enum class GridEventKind { freq_step, phase_jump, sag, harmonic, asymmetry };

/// One scheduled grid event. Harmonic orders count the dq-frame frequency of
/// the disturbance: an order-n harmonic is realized as a negative-sequence
/// stationary-frame component at (n-1)*w_g, which lands at n*w_g in the
/// rotating frame (order 2 is exactly the negative-sequence image of an
/// asymmetric fault). Fractional orders are allowed for narrowband probing.
struct GridEvent {
    double t = 0.0;  // start time, s
    GridEventKind kind = GridEventKind::freq_step;
    double freq_step = 0.0;   // rad/s added to the grid frequency
    double phase_jump = 0.0;  // rad
    double sag_fraction = 1.0;
    double order = 2.0;      // harmonic order (dq frame)
    double fraction = 0.0;   // harmonic amplitude relative to |v_g|
    double phase = 0.0;      // harmonic phase, rad
    double a = 1.0, b = 0.0, psi = 0.0, vg0 = 0.0;  // asymmetry components
};

struct GridModel {
    double v_mag = 0.0;  // nominal |v_g| (peak), V
    std::vector<GridEvent> events;

    void validate() const;
};

/// Three-phase (or synthesized single-phase quadrature) grid voltage at time t.
struct AbcSample {
    double a = 0.0, b = 0.0, c = 0.0;
};
AbcSample grid_voltage(double t, const GridModel& grid, double omega0, Phases phases);

/// Grid electrical angle at time t (fundamental, including steps and jumps).
double grid_angle(double t, const GridModel& grid, double omega0);

/// Amplitude-invariant Park transform and its inverse.
void abc_to_dq(double a, double b, double c, double theta, double& d, double& q);
void dq_to_abc(double d, double q, double theta, double& a, double& b, double& c);

/// Eq.-style power-to-current map; returns false (holding the previous
/// setpoint) when |v_c| is below the voltage floor.
bool power_to_current(double P0, double Q0, double vd, double vq, Phases phases, double v_floor,
                      double& i0d, double& i0q);

struct SetpointStep {
    double t = 0.0;
    double P0 = 0.0, Q0 = 0.0;
};

/// Optional sinusoidal probe added to one current setpoint channel.
struct Probe {
    Axis axis = Axis::d;
    double amplitude = 0.0;  // A
    double omega = 0.0;      // rad/s
    double t_start = 0.0;    // s
};

struct ScenarioConfig {
    LineParams line;  // true plant
    /// Line the controller is designed against (defaults to `line`); lets a
    /// nominal design run against perturbed plants.
    std::optional<LineParams> design_line;
    InverterParams inverter;
    DesignParams design;
    std::vector<AuxCompensator> aux;
    double tau_i = 1e-4;
    GridModel grid;
    double P0 = 0.0, Q0 = 0.0;
    std::vector<SetpointStep> setpoint_steps;
    double duration = 1.0;  // s
    int substeps = 10;
    bool delay_enabled = true;
    std::optional<Probe> probe;

    void validate() const;
};

/// Uniformly sampled simulation record; column names match the CSV contract.
class SimTrace {
public:
    static constexpr int kCols = 18;
    static const char* const kNames[kCols];

    explicit SimTrace(double fs) : fs_(fs) {}
    double fs() const { return fs_; }
    size_t rows() const { return data_[0].size(); }
    const std::vector<double>& column(int i) const { return data_[i]; }
    const std::vector<double>& column(const std::string& name) const;
    static int column_index(const std::string& name);

    void push_row(const double (&row)[kCols]);
    /// Fixed-schema CSV with 9-significant-digit floats.
    void write_csv(std::ostream& os) const;

private:
    double fs_;
    std::vector<double> data_[kCols] = {};
};

enum class SimStatus { ok, diverged };

struct SimResult {
    SimTrace trace;
    SimStatus status = SimStatus::ok;
    std::string message;
    long saturation_count = 0;
    bool nominal_stability_warning = false;
};

/// Deterministic scenario run: discrete controller at fs, RK4 plant substeps.
SimResult run_scenario(const ScenarioConfig& cfg);

struct HarmonicReport {
    double window_start = 0.0, window_seconds = 0.0;
    std::vector<double> magnitude;  // index n = 1..13, magnitude[0] unused
    double thd = 0.0;
};

/// Single-bin Fourier projections at n*omega0 over an integer number of
/// fundamental periods inside the steady-state region.
HarmonicReport measure_harmonics(const SimTrace& trace, const std::string& channel, double omega0,
                                 double t_start, int cycles);

/// Amplitude of the component at `omega` over an integer number of its periods.
double measure_tone(const SimTrace& trace, const std::string& channel, double omega, double t_start,
                    int periods);

/// RMS of all window-resolved bins inside [w_lo, w_hi] over `cycles`
/// fundamental periods.
double band_rms(const SimTrace& trace, const std::string& channel, double omega0, double t_start,
                int cycles, double w_lo, double w_hi);

struct TransientMetrics {
    bool valid = false;
    double step_size = 0.0;
    double rocof_max = 0.0;      // max |dx/dt| after the event
    double extremum = 0.0;       // nadir/zenith value of x
    double settle_time = 0.0;    // s after event, 2% band
    double overshoot = 0.0;      // fraction of step beyond the final value
    double final_value = 0.0;
};

/// Step metrics of a trace channel around an event at t_event.
TransientMetrics transient_metrics(const SimTrace& trace, const std::string& channel, double t_event);

}  // namespace egfl
