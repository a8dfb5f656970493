#include "rigidity.h"

#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "rigidity/errors.hpp"
#include "rigidity/frequency.hpp"
#include "rigidity/roof.hpp"
#include "rigidity/runner.hpp"
#include "rigidity/special_flow.hpp"

using namespace rigidity;

struct rl_freq {
    Frequency v;
};
struct rl_roof {
    RoofFunction v;
};
struct rl_flow {
    FlowParams v;
};
struct rl_report {
    RunResult v;
    std::vector<std::string> names;
};

namespace {

thread_local std::string g_last_error;

rl_status fail(const std::exception& e, rl_status code) {
    g_last_error = e.what();
    return code;
}

template <typename F>
rl_status guarded(F&& fn) {
    try {
        fn();
        return RL_OK;
    } catch (const ConfigError& e) {
        return fail(e, RL_ERR_CONFIG);
    } catch (const Error& e) {
        return fail(e, RL_ERR);
    } catch (const std::exception& e) {
        return fail(e, RL_ERR);
    }
}

rl_status copy_str(const std::string& s, char* buf, size_t cap) {
    if (!buf || cap == 0 || s.size() + 1 > cap) {
        g_last_error = "buffer too small (" + std::to_string(s.size() + 1) + " bytes needed)";
        return RL_ERR_CONFIG;
    }
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return RL_OK;
}

}  // namespace

extern "C" {

const char* rl_version(void) { return "rigidity 1.0.0"; }
const char* rl_last_error(void) { return g_last_error.c_str(); }

rl_status rl_freq_parse(const char* text, int depth, rl_freq** out) {
    return guarded([&] { *out = new rl_freq{Frequency::parse(text, depth)}; });
}

void rl_freq_free(rl_freq* f) { delete f; }

int rl_freq_depth(const rl_freq* f) { return f->v.depth(); }

rl_status rl_freq_digit(const rl_freq* f, int n, int64_t* out) {
    return guarded([&] {
        if (n < 1 || n > f->v.depth()) throw ConfigError("digit index out of range");
        *out = f->v.digit(n);
    });
}

rl_status rl_freq_denominator(const rl_freq* f, int n, char* buf, size_t cap) {
    std::ostringstream os;
    if (n < 0 || n > f->v.depth()) {
        g_last_error = "denominator index out of range";
        return RL_ERR_CONFIG;
    }
    os << f->v.denominators()[static_cast<std::size_t>(n)];
    return copy_str(os.str(), buf, cap);
}

rl_status rl_freq_numerator(const rl_freq* f, int n, char* buf, size_t cap) {
    std::ostringstream os;
    if (n < 0 || n > f->v.depth()) {
        g_last_error = "numerator index out of range";
        return RL_ERR_CONFIG;
    }
    os << f->v.numerators()[static_cast<std::size_t>(n)];
    return copy_str(os.str(), buf, cap);
}

double rl_freq_value(const rl_freq* f) { return f->v.value(); }

rl_status rl_freq_classify(const rl_freq* f, int horizon, int64_t bound, int* bounded,
                           int64_t* bound_M, int64_t* evidence, size_t cap, size_t* count) {
    return guarded([&] {
        auto v = classify_type(f->v, horizon, bound);
        *bounded = v.bounded ? 1 : 0;
        *bound_M = v.bound_M;
        *count = v.evidence_indices.size();
        size_t n = std::min(cap, v.evidence_indices.size());
        for (size_t i = 0; i < n; ++i) evidence[i] = v.evidence_indices[i];
    });
}

rl_status rl_freq_dc_check(const rl_freq* f, double tau, double C, int horizon, int* first) {
    return guarded([&] {
        auto r = dc_check(f->v, tau, C, horizon);
        *first = r.first_violation.value_or(-1);
    });
}

rl_status rl_freq_unbounded_indices(const rl_freq* f, double threshold, int64_t* out, size_t cap,
                                    size_t* count) {
    return guarded([&] {
        auto v = unbounded_sequence(f->v, threshold);
        *count = v.size();
        size_t n = std::min(cap, v.size());
        for (size_t i = 0; i < n; ++i) out[i] = v[i];
    });
}

rl_status rl_freq_ostrowski(const rl_freq* f, const char* n_decimal, int64_t* coeffs, size_t cap,
                            size_t* count) {
    return guarded([&] {
        auto d = ostrowski_decompose(BigInt(n_decimal), f->v);
        *count = d.coefficients.size();
        size_t n = std::min(cap, d.coefficients.size());
        for (size_t i = 0; i < n; ++i) coeffs[i] = d.coefficients[i];
    });
}

rl_status rl_roof_parse(const char* text, rl_roof** out) {
    return guarded([&] { *out = new rl_roof{RoofFunction::parse(text)}; });
}

void rl_roof_free(rl_roof* r) { delete r; }

double rl_roof_eval(const rl_roof* r, double x) { return r->v.eval(x); }
double rl_roof_mean(const rl_roof* r) { return r->v.mean(); }
double rl_roof_inf(const rl_roof* r) { return r->v.inf_certified(); }
double rl_roof_sup(const rl_roof* r) { return r->v.sup_certified(); }
double rl_roof_variation(const rl_roof* r) { return r->v.variation_bound(); }

rl_status rl_roof_serialize(const rl_roof* r, char* buf, size_t cap) {
    return copy_str(r->v.serialize(), buf, cap);
}

rl_status rl_normalize_positive_jump(const rl_freq* a, const rl_roof* r, rl_freq** a_out,
                                     rl_roof** r_out, int* reflected) {
    return guarded([&] {
        auto n = normalize_positive_jump(a->v, r->v);
        *a_out = new rl_freq{n.alpha};
        *r_out = new rl_roof{n.roof};
        *reflected = n.reflected ? 1 : 0;
    });
}

rl_status rl_birkhoff_sum(const rl_roof* r, const rl_freq* a, double x, int64_t n, double* out) {
    return guarded([&] { *out = birkhoff_sum(r->v, a->v, x, n); });
}

rl_status rl_flow_new(const rl_freq* a, const rl_roof* r, rl_flow** out) {
    return guarded([&] { *out = new rl_flow{FlowParams(a->v, r->v)}; });
}

void rl_flow_free(rl_flow* fl) { delete fl; }

rl_status rl_flow_hitting_count(const rl_flow* fl, double x, double s, double t, int64_t* N) {
    return guarded([&] { *N = hitting_count(fl->v, FlowPoint{x, s}, t); });
}

rl_status rl_flow_map(const rl_flow* fl, double x, double s, double t, double* x_out,
                      double* s_out) {
    return guarded([&] {
        FlowPoint p = flow_map(fl->v, FlowPoint{x, s}, t);
        *x_out = p.x;
        *s_out = p.s;
    });
}

double rl_flow_metric(double x1, double s1, double x2, double s2) {
    return flow_metric(FlowPoint{x1, s1}, FlowPoint{x2, s2});
}

rl_status rl_run(const char* config_text, rl_report** out) {
    return guarded([&] {
        KvConfig cfg = KvConfig::parse(config_text);
        auto rep = new rl_report{run_experiment(cfg), {}};
        for (const auto& [name, _] : rep->v.artifacts) rep->names.push_back(name);
        *out = rep;
    });
}

int rl_report_status(const rl_report* rep) { return rep->v.status; }
const char* rl_report_summary(const rl_report* rep) { return rep->v.summary.c_str(); }
size_t rl_report_artifact_count(const rl_report* rep) { return rep->names.size(); }

const char* rl_report_artifact_name(const rl_report* rep, size_t i) {
    return i < rep->names.size() ? rep->names[i].c_str() : "";
}

const char* rl_report_artifact_body(const rl_report* rep, size_t i) {
    if (i >= rep->names.size()) return "";
    return rep->v.artifacts.at(rep->names[i]).c_str();
}

void rl_report_free(rl_report* rep) { delete rep; }

}  // extern "C"
