#include "rigidity/runner.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "rigidity/coboundary.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/matching.hpp"
#include "rigidity/presets.hpp"
#include "rigidity/runner.hpp"
#include "rigidity/special_flow.hpp"
#include "rigidity/trichotomy.hpp"

namespace rigidity {

namespace {

using match::Branch;
using match::Mode;

std::string fmt(double v) { return CsvWriter::num(v); }

Frequency cfg_freq(const KvConfig& cfg, const std::string& key, const std::string& dflt,
                   int depth = 64) {
    return Frequency::parse(cfg.get_or(key, dflt), depth);
}

RunResult run_cf(const KvConfig& cfg) {
    cfg.reject_unknown({"command", "frequency", "depth", "seed", "out", "format"});
    int depth = static_cast<int>(cfg.get_int("depth", 12));
    Frequency f = Frequency::parse(cfg.get("frequency"), depth);
    CsvWriter csv({"n", "a_n", "q_n", "p_n", "paper_literal_q_n"});
    auto lit = f.paper_literal_denominators();
    for (int n = 0; n <= f.depth(); ++n) {
        std::ostringstream q, p;
        q << f.denominators()[static_cast<std::size_t>(n)];
        p << f.numerators()[static_cast<std::size_t>(n)];
        std::ostringstream l;
        l << lit[static_cast<std::size_t>(n)];
        csv.row({CsvWriter::num(static_cast<long long>(n)),
                 n == 0 ? "-" : CsvWriter::num(static_cast<long long>(f.digit(n))), q.str(),
                 p.str(), l.str()});
    }
    RunResult out;
    out.artifacts["cf.csv"] = csv.str();
    std::ostringstream os;
    os << "cf: depth " << f.depth() << ", value ~ " << fmt(f.value())
       << (f.last_digit_unreliable() ? " (last digit unreliable)" : "");
    out.summary = os.str();
    return out;
}

RunResult run_ostrowski(const KvConfig& cfg) {
    cfg.reject_unknown({"command", "frequency", "n", "depth", "seed", "out", "format"});
    Frequency f = cfg_freq(cfg, "frequency", "", 64);
    BigInt n(cfg.get("n"));
    auto d = ostrowski_decompose(n, f);
    CsvWriter csv({"i", "q_i", "b_i"});
    for (std::size_t i = 0; i < d.coefficients.size(); ++i) {
        std::ostringstream q;
        q << f.denominators()[i];
        csv.row({CsvWriter::num(static_cast<long long>(i)), q.str(),
                 CsvWriter::num(static_cast<long long>(d.coefficients[i]))});
    }
    RunResult out;
    out.artifacts["ostrowski.csv"] = csv.str();
    std::ostringstream os;
    os << "ostrowski: " << n << " reconstructs " << d.reconstruct(f)
       << (d.reconstruct(f) == n ? " (exact)" : " (MISMATCH)");
    out.summary = os.str();
    out.status = d.reconstruct(f) == n ? 0 : 1;
    return out;
}

RunResult run_dk(const KvConfig& cfg) {
    cfg.reject_unknown(
        {"command", "frequency", "roof", "index_lo", "index_hi", "samples", "seed", "out", "format"});
    Frequency f = cfg_freq(cfg, "frequency", "cf:[" + std::string("1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1") + "]");
    RoofFunction roof = RoofFunction::parse(cfg.get_or("roof", "jump=1; c0=0"));
    int lo = static_cast<int>(cfg.get_int("index_lo", 2));
    int hi = static_cast<int>(cfg.get_int("index_hi", 12));
    int samples = static_cast<int>(cfg.get_int("samples", 10000));
    auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 20250809));
    DKReport rep = dk_audit(roof, f, lo, hi, samples, seed);
    CsvWriter csv({"n", "q_n", "sup_deviation", "variation_bound"});
    for (const auto& r : rep.records)
        csv.row({CsvWriter::num(static_cast<long long>(r.index)),
                 CsvWriter::num(static_cast<long long>(r.qn)), fmt(r.sup_deviation),
                 fmt(rep.variation_bound)});
    RunResult out;
    out.artifacts["dk_audit.csv"] = csv.str();
    std::ostringstream os;
    os << "dk-audit: " << rep.records.size() << " indices, samples " << samples
       << ", all within variation bound " << fmt(rep.variation_bound) << ": "
       << (rep.all_within_variation ? "yes" : "NO");
    out.summary = os.str();
    out.status = rep.all_within_variation ? 0 : 1;
    return out;
}

RunResult run_flow_orbit(const KvConfig& cfg) {
    cfg.reject_unknown({"command", "frequency", "roof", "x", "s", "t_max", "step", "seed", "out",
                        "format"});
    Frequency fr = cfg_freq(cfg, "frequency", "cf:[" + std::string(
        "1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1") + "]");
    RoofFunction roof = RoofFunction::parse(cfg.get_or("roof", "jump=1; c0=0.2"));
    FlowParams flow(fr, roof);
    FlowPoint p{cfg.get_double("x", 0.25), cfg.get_double("s", 0.0)};
    double tmax = cfg.get_double("t_max", 50.0);
    double step = cfg.get_double("step", 0.5);
    CsvWriter csv({"t", "x", "s", "N"});
    for (double t = 0; t <= tmax; t += step) {
        FlowPoint q = flow_map(flow, p, t);
        std::int64_t N = hitting_count(flow, p, t);
        csv.row({fmt(t), fmt(q.x), fmt(q.s), CsvWriter::num(static_cast<long long>(N))});
    }
    RunResult out;
    out.artifacts["orbit.csv"] = csv.str();
    out.summary = "flow-orbit: " + std::to_string(static_cast<int>(tmax / step) + 1) + " rows";
    return out;
}

RunResult run_trichotomy(const KvConfig& cfg) {
    cfg.reject_unknown(
        {"command", "frequency", "n_lo", "n_hi", "trials", "seed", "out", "format"});
    Frequency beta = cfg_freq(cfg, "frequency", "cf:[" + std::string(
        "1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1") + "]");
    int nlo = static_cast<int>(cfg.get_int("n_lo", 2));
    int nhi = static_cast<int>(cfg.get_int("n_hi", 12));
    int trials = static_cast<int>(cfg.get_int("trials", 10000));
    Rng rng(static_cast<std::uint64_t>(cfg.get_int("seed", 20250809)));
    int allfalse = 0;
    CsvWriter csv({"trial", "n", "arc_len", "holds_i", "holds_ii", "holds_iii"});
    for (int t = 0; t < trials; ++t) {
        int n = static_cast<int>(rng.uniform_int(nlo, nhi));
        double cap = 1.0 / (6.0 * static_cast<double>(beta.q64(n)));
        double len = rng.uniform(cap * 1e-4, cap * 0.999);
        double y = rng.uniform();
        auto v = classify(y, frac(y + len), beta, n);
        if (!v.any()) ++allfalse;
        if (t < 1000)
            csv.row({CsvWriter::num(static_cast<long long>(t)),
                     CsvWriter::num(static_cast<long long>(n)), fmt(len),
                     v.holds_i ? "1" : "0", v.holds_ii ? "1" : "0", v.holds_iii ? "1" : "0"});
    }
    RunResult out;
    out.artifacts["trichotomy.csv"] = csv.str();
    out.summary = "trichotomy: " + std::to_string(trials) + " trials, all-false verdicts " +
                  std::to_string(allfalse);
    out.status = allfalse == 0 ? 0 : 1;
    return out;
}

match::FlowPair cfg_flowpair(const KvConfig& cfg, Branch& branch, bool& correlated, double& eps,
                             double& c, std::int64_t& N, int& trials) {
    if (cfg.has("preset")) {
        MatchPreset p = make_preset(cfg.get("preset"));
        branch = p.branch;
        correlated = p.correlated;
        eps = cfg.get_double("eps", p.eps);
        c = cfg.get_double("c", p.c);
        N = cfg.get_int("N", p.N);
        trials = static_cast<int>(cfg.get_int("trials", p.trials));
        return p.sys;
    }
    branch = cfg.get_or("branch", "unbounded") == "bounded" ? Branch::Bounded : Branch::Unbounded;
    correlated = cfg.get_or("sample_mode", "independent") == "correlated";
    eps = cfg.get_double("eps", 0.05);
    c = cfg.get_double("c", 0.05);
    N = cfg.get_int("N", 1);
    trials = static_cast<int>(cfg.get_int("trials", 200));
    match::FlowPair sys{Frequency::parse(cfg.get("alpha")), RoofFunction::parse(cfg.get("roof_f")),
                        Frequency::parse(cfg.get("beta")), RoofFunction::parse(cfg.get("roof_g"))};
    auto nf = normalize_positive_jump(sys.alpha, sys.f);
    auto ng = normalize_positive_jump(sys.beta, sys.g);
    return {nf.alpha, nf.roof, ng.alpha, ng.roof};
}

const std::set<std::string> kMatchKeys = {"command", "preset",  "alpha",  "beta",   "roof_f",
                                          "roof_g",  "branch",  "mode",   "eps",    "c",
                                          "N",       "trials",  "seed",   "threads", "out",
                                          "format",  "sample_mode"};

RunResult run_match(const KvConfig& cfg) {
    cfg.reject_unknown(kMatchKeys);
    Branch branch;
    bool correlated;
    double eps, c;
    std::int64_t N;
    int trials;
    match::FlowPair sys = cfg_flowpair(cfg, branch, correlated, eps, c, N, trials);
    Mode mode = cfg.get_or("mode", "desk-scale") == "paper-faithful" ? Mode::PaperFaithful
                                                                     : Mode::DeskScale;
    auto C = match::derive_constants(sys, eps, N, mode, branch, c);
    auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 20250809));
    int threads = static_cast<int>(cfg.get_int("threads", 0));
    auto rep = match::criterion_audit(sys, C, trials, seed, threads, correlated);

    CsvWriter csv({"trial", "case", "direction", "n_k", "i_x", "bracket_n", "M_prime", "L_prime",
                   "p", "q", "resid_f", "resid_g", "window_pass", "lift_pass", "M", "L",
                   "U_length", "M_ge_N", "note"});
    for (const auto& r : rep.rows)
        csv.row({CsvWriter::num(static_cast<long long>(r.trial)), r.case_path,
                 CsvWriter::num(static_cast<long long>(r.direction)),
                 CsvWriter::num(static_cast<long long>(r.sample.n_k)),
                 CsvWriter::num(static_cast<long long>(r.sample.i_x)),
                 CsvWriter::num(static_cast<long long>(r.sample.bracket_n)),
                 CsvWriter::num(static_cast<long long>(r.M_prime)),
                 CsvWriter::num(static_cast<long long>(r.L_prime)), fmt(r.p), fmt(r.q),
                 fmt(r.resid_f), fmt(r.resid_g), r.window_pass ? "1" : "0",
                 r.lift_pass ? "1" : "0", fmt(r.M), fmt(r.L), fmt(r.U_length),
                 r.M_ge_N ? "1" : "0", r.note});
    RunResult out;
    out.artifacts["match_trials.csv"] = csv.str();
    std::ostringstream os;
    os.precision(10);
    os << "match: trials " << rep.trials << ", window successes " << rep.window_successes << " ("
       << (100.0 * rep.window_successes / std::max(1, rep.trials)) << "%), lift successes "
       << rep.lift_successes << " (" << (100.0 * rep.lift_successes / std::max(1, rep.trials))
       << "%)\n";
    os << "constants: eps=" << C.eps << " xi=" << C.xi << " c=" << C.c
       << " (paper-faithful " << C.c_paper << ") kappa=" << C.kappa << " delta=" << C.delta
       << " n0=" << C.n0 << " m=" << C.m << " mode="
       << (C.mode == Mode::DeskScale ? "desk-scale" : "paper-faithful")
       << (C.eps_cap_ok ? "" : " [warning: eps above the paper cap " + fmt(C.eps_cap) + "]")
       << "\n";
    os << "two-window trials " << rep.two_window_trials << ", P-guarantee failures "
       << rep.two_window_P_failures << "\ncases:";
    for (const auto& [k, v] : rep.case_histogram) os << " " << k << "=" << v;
    out.summary = os.str();
    return out;
}

RunResult run_lift(const KvConfig& cfg) {
    cfg.reject_unknown(kMatchKeys);
    Branch branch;
    bool correlated;
    double eps, c;
    std::int64_t N;
    int trials;
    match::FlowPair sys = cfg_flowpair(cfg, branch, correlated, eps, c, N, trials);
    auto C = match::derive_constants(sys, eps, N, Mode::DeskScale, branch, c);
    auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 20250809));
    Rng rng(seed);
    auto scales = match::admissible_scales(sys, C);
    auto ms = match::sample_match(sys, C, scales, rng, correlated);
    auto fr = match::find_window(ms, sys, C);
    RunResult out;
    std::ostringstream os;
    os.precision(10);
    os << "lift: case " << fr.case_path << ", candidates " << fr.candidates.size() << "\n";
    CsvWriter csv({"candidate", "M_prime", "L_prime", "p", "q", "in_P", "resid_f", "resid_g",
                   "window_pass", "M", "L", "U_length", "U_intervals", "dist_f", "dist_g",
                   "lift_pass"});
    int idx = 0;
    for (const auto& w : fr.candidates) {
        auto vr = match::verify_window(ms, w, sys, C);
        match::LiftReport lr;
        if (vr.pass) lr = match::lift_to_continuous(ms, w, sys, C);
        csv.row({CsvWriter::num(static_cast<long long>(idx++)),
                 CsvWriter::num(static_cast<long long>(w.M_prime)),
                 CsvWriter::num(static_cast<long long>(w.L_prime)), fmt(w.p), fmt(w.q),
                 w.in_P ? "1" : "0", fmt(vr.resid_f), fmt(vr.resid_g), vr.pass ? "1" : "0",
                 fmt(lr.M), fmt(lr.L), fmt(lr.U_length),
                 CsvWriter::num(static_cast<long long>(lr.U_intervals)), fmt(lr.dist_f_max),
                 fmt(lr.dist_g_max), lr.pass ? "1" : "0"});
    }
    out.artifacts["lift.csv"] = csv.str();
    out.summary = os.str();
    return out;
}

RunResult run_coboundary(const KvConfig& cfg) {
    cfg.reject_unknown(
        {"command", "alpha", "roof_psi", "roof_phi", "max_harmonic", "seed", "out", "format"});
    Frequency alpha = cfg_freq(cfg, "alpha", "cf:[" + std::string(
        "1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1") + "]");
    RoofFunction psi = RoofFunction::parse(cfg.get("roof_psi"));
    RoofFunction phi = RoofFunction::parse(cfg.get("roof_phi"));
    int mh = static_cast<int>(cfg.get_int("max_harmonic", 32));
    auto v = dichotomy(psi, phi, alpha, mh);
    RunResult out;
    out.summary = "coboundary: " + v.serialize();
    CsvWriter csv({"k", "divisor", "near_denominator"});
    for (const auto& d : small_divisor_profile(alpha, mh))
        csv.row({CsvWriter::num(static_cast<long long>(d.k)), fmt(d.divisor),
                 d.near_denominator ? "1" : "0"});
    out.artifacts["divisors.csv"] = csv.str();
    return out;
}

RunResult run_joining(const KvConfig& cfg) {
    cfg.reject_unknown({"command", "preset", "T", "samples", "seed", "threads", "out", "format"});
    MatchPreset p = make_preset(cfg.get_or("preset", "acceptance-unbounded"));
    double T = cfg.get_double("T", 100000.0);
    int samples = static_cast<int>(cfg.get_int("samples", 20));
    auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 20250809));
    int threads = static_cast<int>(cfg.get_int("threads", 0));
    FlowParams A(p.sys.alpha, p.sys.f), B(p.sys.beta, p.sys.g);
    Observable obs = default_observable();
    auto rep = product_birkhoff_correlation(A, B, obs, obs, T, samples, seed, threads);
    auto ctl = self_joining_control(A, obs, T, std::max(1, samples / 4), seed ^ 0x5a5a, threads);
    CsvWriter csv({"seed", "joint", "marginal_a", "marginal_b", "gap"});
    for (const auto& r : rep.rows)
        csv.row({CsvWriter::num(static_cast<long long>(r.seed & 0xffff)), fmt(r.joint),
                 fmt(r.marginal_a), fmt(r.marginal_b), fmt(r.gap)});
    RunResult out;
    out.artifacts["joining.csv"] = csv.str();
    std::ostringstream os;
    os.precision(6);
    os << "joining (" << rep.banner << "): T=" << T << " max gap " << rep.max_gap
       << ", diagonal control " << ctl.diagonal_statistic << ", ratio "
       << (rep.max_gap > 0 ? ctl.diagonal_statistic / rep.max_gap : 1e99);
    out.summary = os.str();
    return out;
}

}  // namespace

RunResult run_experiment(const KvConfig& cfg) {
    try {
        std::string cmd = cfg.get("command");
        if (cmd == "cf") return run_cf(cfg);
        if (cmd == "ostrowski") return run_ostrowski(cfg);
        if (cmd == "dk-audit") return run_dk(cfg);
        if (cmd == "flow-orbit") return run_flow_orbit(cfg);
        if (cmd == "trichotomy") return run_trichotomy(cfg);
        if (cmd == "match") return run_match(cfg);
        if (cmd == "lift") return run_lift(cfg);
        if (cmd == "coboundary") return run_coboundary(cfg);
        if (cmd == "joining") return run_joining(cfg);
        throw ConfigError("unknown command: " + cmd);
    } catch (const ConfigError& e) {
        return {2, std::string("config error: ") + e.what(), {}};
    } catch (const Error& e) {
        return {1, std::string("error: ") + e.what(), {}};
    }
}

}  // namespace rigidity
