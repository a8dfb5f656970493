#pragma once

#include <string>
#include <vector>

#include "rigidity/frequency.hpp"
#include "rigidity/roof.hpp"

namespace rigidity {

struct TransferFunction {
    std::vector<Harmonic> harmonics;  // mean-zero: no constant term
    double residual = 0;              // sup grid |xi(x) - xi(x+alpha) - phi(x)|
    double min_divisor = 0;           // smallest |1 - e(k alpha)| used
    double eval(double x) const;
};

/// Solves xi - xi o R_alpha = phi per harmonic: xi_hat(k) = phi_hat(k)/(e(k a)-1).
/// phi must have zero jump and zero mean (exact for trig polynomials).
TransferFunction fourier_coboundary_solve(const RoofFunction& phi, const Frequency& alpha,
                                          int max_harmonic);

enum class DichotomyKind { Cohomologous, Disjoint, Inconclusive };

struct DichotomyVerdict {
    DichotomyKind kind = DichotomyKind::Inconclusive;
    std::string reason;
    TransferFunction transfer;  // cohomologous branch only
    int dc_horizon = 0;         // horizon of the Diophantine check backing the verdict
    std::string serialize() const;
};

/// Corollary-style dichotomy: |jump| mismatch => disjoint; equal jumps and
/// equal means => cohomologous via the Fourier solve on the difference;
/// opposite jumps or unequal means => inconclusive with reason.
DichotomyVerdict dichotomy(const RoofFunction& f_psi, const RoofFunction& f_phi,
                           const Frequency& alpha, int max_harmonic);

struct DivisorSample {
    int k = 0;
    double divisor = 0;       // |1 - e(2 pi i k alpha)|
    bool near_denominator = false;
};

std::vector<DivisorSample> small_divisor_profile(const Frequency& alpha, int max_harmonic);

}  // namespace rigidity
