#include "rigidity/coboundary.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "rigidity/errors.hpp"
#include "rigidity/orbit.hpp"
#include "rigidity/util.hpp"

namespace rigidity {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ||k alpha|| certified through the surrogate (error k/q^2, negligible here)
double norm_k_alpha(const Frequency& alpha, std::int64_t k) {
    Rotation rot(alpha);
    auto r = static_cast<std::int64_t>(static_cast<__int128>(k % rot.q) * (rot.p % rot.q) % rot.q);
    if (r < 0) r += rot.q;
    return static_cast<double>(rot.dist0(r)) / static_cast<double>(rot.q);
}
}  // namespace

double TransferFunction::eval(double x) const {
    double fr = frac(x);
    double v = 0;
    for (const auto& h : harmonics)
        v += h.cos_coef * std::cos(kTwoPi * h.k * fr) + h.sin_coef * std::sin(kTwoPi * h.k * fr);
    return v;
}

TransferFunction fourier_coboundary_solve(const RoofFunction& phi, const Frequency& alpha,
                                          int max_harmonic) {
    if (phi.jump() != 0.0) throw NonzeroJump("coboundary solve needs jump 0");
    if (phi.mean() != 0.0) throw NonzeroMean("coboundary solve needs mean 0");
    TransferFunction xi;
    xi.min_divisor = 2.0;
    for (const auto& h : phi.harmonics()) {
        if (h.k > max_harmonic) continue;
        double nka = norm_k_alpha(alpha, h.k);
        double divisor = 2.0 * std::abs(std::sin(std::numbers::pi * nka));
        if (!(divisor > 1e-14))
            throw SmallDivisorUnderflow("divisor at harmonic " + std::to_string(h.k) +
                                        " below certification precision");
        xi.min_divisor = std::min(xi.min_divisor, divisor);
        // xi(x) - xi(x + alpha) = phi(x):  xi_hat(k) = phi_hat(k) / (1 - e(k alpha)),
        // the unique mean-zero solution compatible with phi^{(n)} = xi - xi o R^n
        std::complex<double> ph(h.cos_coef / 2.0, -h.sin_coef / 2.0);
        std::complex<double> rot = std::polar(1.0, kTwoPi * alpha.value() * h.k);
        std::complex<double> xh = ph / (1.0 - rot);
        Harmonic out;
        out.k = h.k;
        out.cos_coef = 2.0 * xh.real();
        out.sin_coef = -2.0 * xh.imag();
        xi.harmonics.push_back(out);
    }
    // residual on a 10^4 grid
    constexpr int kGrid = 10000;
    double worst = 0;
    for (int i = 0; i < kGrid; ++i) {
        double x = (i + 0.5) / kGrid;
        worst = std::max(worst, std::abs(xi.eval(x) - xi.eval(x + alpha.value()) - phi.eval(x)));
    }
    xi.residual = worst;
    return xi;
}

DichotomyVerdict dichotomy(const RoofFunction& f_psi, const RoofFunction& f_phi,
                           const Frequency& alpha, int max_harmonic) {
    DichotomyVerdict v;
    v.dc_horizon = std::min(alpha.max_index64() - 1, alpha.depth());
    const double Ap = f_psi.jump(), Aq = f_phi.jump();
    if (std::abs(std::abs(Ap) - std::abs(Aq)) > 0) {
        v.kind = DichotomyKind::Disjoint;
        v.reason = "|jump| values differ; the flows are disjoint";
        return v;
    }
    if (Ap != Aq) {
        v.kind = DichotomyKind::Inconclusive;
        v.reason = "opposite jumps: the reflection changes the base rotation; not covered";
        return v;
    }
    if (f_psi.mean() != f_phi.mean()) {
        v.kind = DichotomyKind::Inconclusive;
        v.reason = "means differ; the dichotomy is stated for equal-mean time changes";
        return v;
    }
    // equal jumps, equal means: solve on the difference (jumps cancel)
    std::vector<Harmonic> diff;
    {
        // merge harmonics of psi - phi
        auto add = [&](const Harmonic& h, double sgn) {
            for (auto& d : diff)
                if (d.k == h.k) {
                    d.cos_coef += sgn * h.cos_coef;
                    d.sin_coef += sgn * h.sin_coef;
                    return;
                }
            diff.push_back({h.k, sgn * h.cos_coef, sgn * h.sin_coef});
        };
        for (const auto& h : f_psi.harmonics()) add(h, +1);
        for (const auto& h : f_phi.harmonics()) add(h, -1);
    }
    RoofFunction phi(0.0, 0.0, std::move(diff));
    try {
        v.transfer = fourier_coboundary_solve(phi, alpha, max_harmonic);
        v.kind = DichotomyKind::Cohomologous;
        v.reason = "equal jumps and means; transfer function solved";
    } catch (const Error& e) {
        v.kind = DichotomyKind::Inconclusive;
        v.reason = std::string("solver: ") + e.what();
    }
    return v;
}

std::string DichotomyVerdict::serialize() const {
    std::ostringstream os;
    os.precision(12);
    switch (kind) {
        case DichotomyKind::Cohomologous:
            os << "cohomologous residual=" << transfer.residual
               << " min-divisor=" << transfer.min_divisor;
            break;
        case DichotomyKind::Disjoint:
            os << "disjoint";
            break;
        case DichotomyKind::Inconclusive:
            os << "inconclusive";
            break;
    }
    os << " dc-horizon=" << dc_horizon << " note=\"" << reason << "\"";
    return os.str();
}

std::vector<DivisorSample> small_divisor_profile(const Frequency& alpha, int max_harmonic) {
    std::vector<DivisorSample> out;
    out.reserve(static_cast<std::size_t>(std::max(0, max_harmonic)));
    for (int k = 1; k <= max_harmonic; ++k) {
        DivisorSample d;
        d.k = k;
        d.divisor = 2.0 * std::abs(std::sin(std::numbers::pi * norm_k_alpha(alpha, k)));
        for (int n = 1; n <= alpha.max_index64(); ++n) {
            if (alpha.q64(n) == k) d.near_denominator = true;
            if (alpha.q64(n) > k) break;
        }
        out.push_back(d);
    }
    return out;
}

}  // namespace rigidity
