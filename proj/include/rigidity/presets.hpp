#pragma once

#include <string>

#include "rigidity/joining.hpp"
#include "rigidity/matching.hpp"

namespace rigidity {

struct MatchPreset {
    match::FlowPair sys;
    double eps;
    double c;
    std::int64_t N;
    int trials;
    match::Branch branch;
    bool correlated;  // contrast preset samples the y-pair on the x-pair
    std::string name;
};

/// acceptance-unbounded, acceptance-bounded, contrast-equal-jumps
MatchPreset make_preset(const std::string& name);

/// the digit list 1,2,1,4,1,8,... continued until the convergents exhaust int64
std::vector<std::int64_t> unbounded_digit_list();

Observable default_observable();  // cos(2 pi x), constant in s

}  // namespace rigidity
