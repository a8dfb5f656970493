/* C interface to the rigidity lab: opaque handles, status codes.
 *
 * Every function returns RL_OK on success; on failure a status code is
 * returned and rl_last_error() carries a thread-local message.  Handles are
 * created by rl_*_new/parse functions and released with the matching free.
 */
#ifndef RIGIDITY_H
#define RIGIDITY_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rl_status {
    RL_OK = 0,
    RL_ERR = 1,        /* domain / invariant error */
    RL_ERR_CONFIG = 2, /* malformed input or config */
} rl_status;

typedef struct rl_freq rl_freq;
typedef struct rl_roof rl_roof;
typedef struct rl_flow rl_flow;
typedef struct rl_report rl_report;

const char* rl_version(void);
const char* rl_last_error(void);

/* ---- frequencies (continued fractions) -------------------------------- */
/* text: "cf:[a1,a2,...]" or "real:<decimal>@<precision-bits>" */
rl_status rl_freq_parse(const char* text, int depth, rl_freq** out);
void rl_freq_free(rl_freq* f);
int rl_freq_depth(const rl_freq* f);
rl_status rl_freq_digit(const rl_freq* f, int n, int64_t* out);
/* q_n / p_n as decimal strings (arbitrary precision) */
rl_status rl_freq_denominator(const rl_freq* f, int n, char* buf, size_t cap);
rl_status rl_freq_numerator(const rl_freq* f, int n, char* buf, size_t cap);
double rl_freq_value(const rl_freq* f);
/* bounded-type verdict over a horizon; evidence indices written when unbounded */
rl_status rl_freq_classify(const rl_freq* f, int horizon, int64_t bound, int* bounded,
                           int64_t* bound_M, int64_t* evidence, size_t cap, size_t* count);
/* first n violating |alpha - p_n/q_n| > C/q_n^tau, or -1 */
rl_status rl_freq_dc_check(const rl_freq* f, double tau, double C, int horizon, int* first);
rl_status rl_freq_unbounded_indices(const rl_freq* f, double threshold, int64_t* out, size_t cap,
                                    size_t* count);
/* greedy Ostrowski digits of n (decimal string); coefficients b_0.. */
rl_status rl_freq_ostrowski(const rl_freq* f, const char* n_decimal, int64_t* coeffs, size_t cap,
                            size_t* count);

/* ---- roofs ------------------------------------------------------------- */
/* text: "jump=<A>; c0=<c>; k:<k>=<cos>,<sin>; ..." */
rl_status rl_roof_parse(const char* text, rl_roof** out);
void rl_roof_free(rl_roof* r);
double rl_roof_eval(const rl_roof* r, double x);
double rl_roof_mean(const rl_roof* r);
double rl_roof_inf(const rl_roof* r);
double rl_roof_sup(const rl_roof* r);
double rl_roof_variation(const rl_roof* r);
rl_status rl_roof_serialize(const rl_roof* r, char* buf, size_t cap);
/* reflection normalization; *reflected set to 1 when the conjugation applied */
rl_status rl_normalize_positive_jump(const rl_freq* a, const rl_roof* r, rl_freq** a_out,
                                     rl_roof** r_out, int* reflected);

/* Birkhoff sum f^{(n)}(x), n may be negative */
rl_status rl_birkhoff_sum(const rl_roof* r, const rl_freq* a, double x, int64_t n, double* out);

/* ---- special flows ------------------------------------------------------ */
rl_status rl_flow_new(const rl_freq* a, const rl_roof* r, rl_flow** out);
void rl_flow_free(rl_flow* fl);
rl_status rl_flow_hitting_count(const rl_flow* fl, double x, double s, double t, int64_t* N);
rl_status rl_flow_map(const rl_flow* fl, double x, double s, double t, double* x_out,
                      double* s_out);
double rl_flow_metric(double x1, double s1, double x2, double s2);

/* ---- experiments --------------------------------------------------------
 * config: `key = value` lines, '#' comments; command = cf | ostrowski |
 * dk-audit | flow-orbit | trichotomy | match | lift | coboundary | joining.
 * The report carries a summary plus named CSV artifacts.
 */
rl_status rl_run(const char* config_text, rl_report** out);
int rl_report_status(const rl_report* rep);
const char* rl_report_summary(const rl_report* rep);
size_t rl_report_artifact_count(const rl_report* rep);
const char* rl_report_artifact_name(const rl_report* rep, size_t i);
const char* rl_report_artifact_body(const rl_report* rep, size_t i);
void rl_report_free(rl_report* rep);

#ifdef __cplusplus
}
#endif

#endif /* RIGIDITY_H */
