#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rigidity/special_flow.hpp"

namespace rigidity {

/// Observable on the suspension: P(x) * Q(s), both trig polynomials (Q has
/// period 1 in the flow direction).  Bounded; the mean under lambda^f comes
/// from quadrature in x with the exact antiderivative of Q in s.
struct Observable {
    std::vector<Harmonic> in_x;  // P(x) = c_x + sum harmonics
    double const_x = 1.0;
    std::vector<Harmonic> in_s;  // Q(s) = c_s + sum harmonics
    double const_s = 1.0;

    double eval(double x, double s) const;
    double sup_norm() const;
    double mean(const FlowParams& flow) const;  // quadrature over the suspension
};

struct CorrelationRow {
    std::uint64_t seed = 0;
    double joint = 0;
    double marginal_a = 0;
    double marginal_b = 0;
    double gap = 0;  // |joint - mean_a * mean_b|
};

struct CorrelationReport {
    std::vector<CorrelationRow> rows;
    double horizon = 0;
    double mean_a = 0, mean_b = 0;  // space means (quadrature)
    double max_gap = 0;
    double diagonal_statistic = 0;  // self-joining control path only
    std::string banner = "evidence, not proof: disjointness is not certified numerically";
};

/// Time-grid average of obsA(T_t z) obsB(S_t w) over seeded starts; gap to the
/// product of space means probes whether the product measure is the only limit.
CorrelationReport product_birkhoff_correlation(const FlowParams& flowA, const FlowParams& flowB,
                                               const Observable& obsA, const Observable& obsB,
                                               double T, int samples, std::uint64_t seed,
                                               int threads = 0);

/// Diagonal control: same flow, same start, obs^2 averaged along the orbit.
CorrelationReport self_joining_control(const FlowParams& flow, const Observable& obs, double T,
                                       int samples, std::uint64_t seed, int threads = 0);

}  // namespace rigidity
