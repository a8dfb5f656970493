// Experiment runner: thin shell over the shared-library C API.  Subcommand
// flags are assembled into the key=value experiment config and handed to
// rl_run; artifacts land in --out.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rigidity.h"

namespace {

struct Common {
    std::string out = ".";
    std::string format = "csv";
    long long seed = 20250809;
    std::string config_file;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--out", c.out, "output directory for artifacts");
    app->add_option("--seed", c.seed, "experiment seed");
    app->add_option("--format", c.format, "artifact format (csv)")->check(CLI::IsMember({"csv"}));
    app->add_option("--config", c.config_file, "key = value config file (merged under flags)");
}

int execute(const std::map<std::string, std::string>& kv, const Common& c) {
    std::string text;
    if (!c.config_file.empty()) {
        std::ifstream in(c.config_file);
        if (!in) {
            std::cerr << "cannot open config: " << c.config_file << "\n";
            return 2;
        }
        std::string line;
        while (std::getline(in, line)) text += line + "\n";
    }
    for (const auto& [k, v] : kv) text += k + " = " + v + "\n";
    text += "seed = " + std::to_string(c.seed) + "\n";
    text += "format = " + c.format + "\n";

    rl_report* rep = nullptr;
    rl_status st = rl_run(text.c_str(), &rep);
    if (st != RL_OK) {
        std::cerr << "error: " << rl_last_error() << "\n";
        return st == RL_ERR_CONFIG ? 2 : 1;
    }
    std::filesystem::create_directories(c.out);
    for (size_t i = 0; i < rl_report_artifact_count(rep); ++i) {
        auto path = std::filesystem::path(c.out) / rl_report_artifact_name(rep, i);
        std::ofstream of(path);
        of << rl_report_artifact_body(rep, i);
        std::cout << "wrote " << path.string() << "\n";
    }
    std::cout << rl_report_summary(rep) << "\n";
    int status = rl_report_status(rep);
    rl_report_free(rep);
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigidity lab: special flows over irrational rotations"};
    app.require_subcommand(1);
    std::map<std::string, std::string> kv;
    Common common;

    auto opt = [&](CLI::App* sub, const char* flag, const char* key, const char* help) {
        sub->add_option_function<std::string>(
            flag, [&kv, key](const std::string& v) { kv[key] = v; }, help);
    };

    auto* cf = app.add_subcommand("cf", "continued-fraction table of a frequency");
    kv["command"] = "";
    opt(cf, "--freq", "frequency", "cf:[...] or real:<decimal>@<bits>");
    opt(cf, "--real", "real_shorthand", "decimal value (shorthand for real:<v>@60)");
    opt(cf, "--depth", "depth", "expansion depth");
    add_common(cf, common);

    auto* ost = app.add_subcommand("ostrowski", "greedy Ostrowski decomposition");
    opt(ost, "--freq", "frequency", "frequency literal");
    opt(ost, "--n", "n", "positive integer to decompose");
    add_common(ost, common);

    auto* dk = app.add_subcommand("dk-audit", "Denjoy-Koksma deviation audit");
    opt(dk, "--freq", "frequency", "frequency literal");
    opt(dk, "--roof", "roof", "roof literal");
    opt(dk, "--index-lo", "index_lo", "first denominator index");
    opt(dk, "--index-hi", "index_hi", "last denominator index");
    opt(dk, "--samples", "samples", "sample count");
    add_common(dk, common);

    auto* orb = app.add_subcommand("flow-orbit", "orbit dump of the special flow");
    opt(orb, "--freq", "frequency", "frequency literal");
    opt(orb, "--roof", "roof", "roof literal");
    opt(orb, "--x", "x", "base point");
    opt(orb, "--s", "s", "height");
    opt(orb, "--t-max", "t_max", "horizon");
    opt(orb, "--step", "step", "output step");
    add_common(orb, common);

    auto* tri = app.add_subcommand("trichotomy", "arc-hitting trichotomy audit");
    opt(tri, "--freq", "frequency", "frequency literal");
    opt(tri, "--n-lo", "n_lo", "smallest scale index");
    opt(tri, "--n-hi", "n_hi", "largest scale index");
    opt(tri, "--trials", "trials", "trial count");
    add_common(tri, common);

    auto* mt = app.add_subcommand("match", "matching-window criterion audit");
    opt(mt, "--preset", "preset",
        "acceptance-unbounded | acceptance-bounded | contrast-equal-jumps");
    opt(mt, "--alpha", "alpha", "frequency literal for the f-flow");
    opt(mt, "--beta", "beta", "frequency literal for the g-flow");
    opt(mt, "--roof-f", "roof_f", "roof literal");
    opt(mt, "--roof-g", "roof_g", "roof literal");
    opt(mt, "--branch", "branch", "unbounded | bounded");
    opt(mt, "--mode", "mode", "desk-scale | paper-faithful");
    opt(mt, "--eps", "eps", "epsilon");
    opt(mt, "--c", "c", "desk-scale c override");
    opt(mt, "--N", "N", "criterion N");
    opt(mt, "--trials", "trials", "trial count");
    opt(mt, "--threads", "threads", "worker threads (0 = auto)");
    add_common(mt, common);

    auto* lf = app.add_subcommand("lift", "one matching trial with continuous lift detail");
    opt(lf, "--preset", "preset", "preset name");
    opt(lf, "--eps", "eps", "epsilon");
    opt(lf, "--c", "c", "desk-scale c override");
    add_common(lf, common);

    auto* cb = app.add_subcommand("coboundary", "cohomology / disjointness dichotomy");
    opt(cb, "--alpha", "alpha", "frequency literal");
    opt(cb, "--roof-psi", "roof_psi", "first roof literal");
    opt(cb, "--roof-phi", "roof_phi", "second roof literal");
    opt(cb, "--max-harmonic", "max_harmonic", "Fourier truncation");
    add_common(cb, common);

    auto* jn = app.add_subcommand("joining", "product-orbit correlation experiment");
    opt(jn, "--preset", "preset", "flow-pair preset");
    opt(jn, "--T", "T", "time horizon");
    opt(jn, "--samples", "samples", "seeded starts");
    opt(jn, "--threads", "threads", "worker threads (0 = auto)");
    add_common(jn, common);

    CLI11_PARSE(app, argc, argv);

    for (auto* sub : app.get_subcommands()) kv["command"] = sub->get_name();
    if (auto it = kv.find("real_shorthand"); it != kv.end()) {
        kv["frequency"] = "real:" + it->second + "@60";
        kv.erase(it);
    }
    return execute(kv, common);
}
