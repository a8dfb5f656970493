#include "rigidity/trichotomy.hpp"

#include <cmath>

#include "rigidity/errors.hpp"
#include "rigidity/orbit.hpp"

namespace rigidity {

namespace {

struct Arc {
    std::int64_t lead;  // residue of the leading endpoint: arc = [lead-len, lead]
    std::int64_t len;
};

// the shorter arc between u and v as residues
Arc make_arc(const Rotation& rot, double u, double v) {
    std::int64_t ru = rot.rationalize(u), rv = rot.rationalize(v);
    std::int64_t d = ru - rv;
    if (d < 0) d += rot.q;
    if (2 * d == rot.q) throw ArcTooWide("arc of length exactly 1/2 rejected");
    if (2 * d < rot.q) return {ru, d};
    return {rv, rot.q - d};
}

}  // namespace

TrichotomyVerdict classify(double y, double yp, const Frequency& beta, int n) {
    Rotation rot(beta);
    Arc arc = make_arc(rot, y, yp);
    std::int64_t qn = beta.q64(n), qn1 = beta.q64(n + 1);
    // ||y-y'|| < 1/(6 q'_n)  <=>  6 qn len < q
    if (!(static_cast<__int128>(6 * qn) * arc.len < rot.q))
        throw ArcTooWide("||y-y'|| must be < 1/(6 q'_n)");
    TrichotomyVerdict v;
    std::int64_t K = qn1 / 6;
    auto fw = rot.first_hit(arc.lead, arc.len, 0, K, +1);
    auto bw = rot.first_hit(arc.lead, arc.len, 0, K, -1);
    auto third = rot.first_hit(arc.lead, arc.len, 0, qn - 1, +1);
    v.holds_i = !fw.has_value();
    v.witness_i = fw;
    v.holds_ii = !bw.has_value();
    v.witness_ii = bw;
    v.holds_iii = third.has_value();
    v.witness_iii = third;
    // boundary-graze flag: a hit that lands exactly on an endpoint
    for (auto w : {fw, bw, third}) {
        if (!w) continue;
        std::int64_t r = rot.at(arc.lead, (w == bw ? -*w : *w));
        if (r == arc.len || r == 0) v.ambiguous = true;
    }
    return v;
}

std::optional<std::int64_t> first_hit_index(double x, double xp, const Frequency& alpha,
                                            std::int64_t bound) {
    Rotation rot(alpha);
    Arc arc = make_arc(rot, x, xp);
    return rot.first_hit(arc.lead, arc.len, 0, bound, +1);
}

std::optional<double> first_hit_real(double y, double yp, const Frequency& beta, double xi,
                                     std::int64_t bound) {
    auto j = first_hit_index(y, yp, beta, bound);
    if (!j) return std::nullopt;
    return xi * static_cast<double>(*j);
}

}  // namespace rigidity
