/* egfl -- grid-following inverter control design, analysis, and simulation.
 *
 * C interface of the shared library: opaque handles, integer status codes,
 * JSON strings for structured configuration and reports. All functions are
 * thread-safe as long as each handle is used from one thread at a time;
 * egfl_last_error() is thread-local.
 */
#ifndef EGFL_H
#define EGFL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum egfl_status {
    EGFL_OK = 0,
    EGFL_ERR_CHECK = 1,    /* a requested verification failed */
    EGFL_ERR_INVALID = 2,  /* bad arguments or malformed config */
    EGFL_ERR_DIVERGED = 3, /* simulation diverged (partial trace available) */
    EGFL_ERR_NUMERIC = 4   /* internal numerical failure */
} egfl_status;

typedef struct egfl_design egfl_design;     /* controller set + cascade realization */
typedef struct egfl_analysis egfl_analysis; /* frequency-domain analysis bundle */
typedef struct egfl_scenario egfl_scenario; /* resolved simulation scenario */
typedef struct egfl_trace egfl_trace;       /* sampled simulation record */

const char* egfl_version(void);
/* Message of the last failing call on this thread. */
const char* egfl_last_error(void);
void egfl_string_free(char* s);

/* --- design ------------------------------------------------------------ */

/* config_json: {"line": ..., "inverter": ..., "design": ..., "aux": [...],
 * "uncertainty": ...} (see README for the schema). */
egfl_status egfl_design_create(const char* config_json, egfl_design** out);
void egfl_design_destroy(egfl_design* d);
/* Full structured report (controller/cascade coefficients, predicted phase
 * margins, synchronization verdict); caller frees with egfl_string_free. */
egfl_status egfl_design_report(const egfl_design* d, char** json_out);
egfl_status egfl_design_sync_ok(const egfl_design* d, int* ok);
/* axis: 'd' or 'q'. in_range reports the prediction validity condition. */
egfl_status egfl_design_predicted_pm(const egfl_design* d, char axis, double* pm_deg, int* in_range);

/* --- analysis ----------------------------------------------------------- */

egfl_status egfl_analysis_run(const char* config_json, int grid_points, unsigned long long seed,
                              egfl_analysis** out);
void egfl_analysis_destroy(egfl_analysis* a);
egfl_status egfl_analysis_summary(const egfl_analysis* a, char** json_out);
egfl_status egfl_analysis_write_csv(const egfl_analysis* a, const char* path);
/* nominal_ok / rs_ok / bode_ok: 1 pass, 0 fail; rs_ok = -1 when no box. */
egfl_status egfl_analysis_verdicts(const egfl_analysis* a, int* nominal_ok, int* rs_ok, int* bode_ok);

/* --- simulation ---------------------------------------------------------- */

egfl_status egfl_scenario_create(const char* config_json, egfl_scenario** out);
void egfl_scenario_destroy(egfl_scenario* s);
/* On divergence returns EGFL_ERR_DIVERGED and still hands out the partial
 * trace. */
egfl_status egfl_simulate(const egfl_scenario* s, egfl_trace** out);
void egfl_trace_destroy(egfl_trace* t);

long egfl_trace_rows(const egfl_trace* t);
int egfl_trace_cols(const egfl_trace* t);
const char* egfl_trace_col_name(const egfl_trace* t, int i);
/* Borrowed pointer, valid for the life of the trace. Channel names accept the
 * CSV headers or the unitless aliases (ig_d, vc_q, dw, ...). */
egfl_status egfl_trace_column(const egfl_trace* t, const char* channel, const double** data,
                              long* len);
egfl_status egfl_trace_write_csv(const egfl_trace* t, const char* path);
/* 1 when the run diverged (trace is partial). */
int egfl_trace_diverged(const egfl_trace* t);
long egfl_trace_saturation_count(const egfl_trace* t);

/* Harmonic magnitudes at n*omega0 (n = 1..13) plus THD over an integer number
 * of fundamental cycles starting at t_start. */
egfl_status egfl_trace_harmonics(const egfl_trace* t, const char* channel, double omega0,
                                 double t_start, int cycles, char** json_out);
/* Step metrics (RoCoF, nadir/zenith, settling, overshoot) around t_event. */
egfl_status egfl_trace_transient(const egfl_trace* t, const char* channel, double t_event,
                                 char** json_out);
/* Amplitude of the tone at omega over an integer number of its periods. */
egfl_status egfl_trace_tone(const egfl_trace* t, const char* channel, double omega, double t_start,
                            int periods, double* amplitude);
/* RMS of all resolved bins in [w_lo, w_hi] over `cycles` fundamental periods. */
egfl_status egfl_trace_band_rms(const egfl_trace* t, const char* channel, double omega0,
                                double t_start, int cycles, double w_lo, double w_hi, double* rms);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EGFL_H */
