#include "rigidity/presets.hpp"

#include "rigidity/errors.hpp"

namespace rigidity {

std::vector<std::int64_t> unbounded_digit_list() {
    // 1, 2, 1, 4, 1, 8, ...: the even positions double; stop once the
    // convergents are deep enough for every surrogate we use
    std::vector<std::int64_t> d;
    std::int64_t big = 2;
    for (int j = 0; j < 26; ++j) {
        d.push_back(1);
        d.push_back(big);
        big *= 2;
    }
    return d;
}

namespace {

RoofFunction preset_f() {
    // {x} + 0.2 + 0.1 sin(2 pi x): positive roof (inf 0.2), mean 0.7
    return RoofFunction(1.0, 0.2, {{1, 0.0, 0.1}});
}

RoofFunction preset_g() {
    // 2{x} + 0.4 + 0.1 cos(2 pi x): positive roof (inf ~0.5), mean 1.4, xi = 2
    return RoofFunction(2.0, 0.4, {{1, 0.1, 0.0}});
}

}  // namespace

MatchPreset make_preset(const std::string& name) {
    if (name == "acceptance-unbounded") {
        return MatchPreset{{Frequency::from_digits(unbounded_digit_list()), preset_f(),
                            Frequency::from_digits(std::vector<std::int64_t>(85, 1)), preset_g()},
                           0.05, 0.05, 1, 200, match::Branch::Unbounded, false, name};
    }
    if (name == "acceptance-bounded") {
        return MatchPreset{{Frequency::from_digits(std::vector<std::int64_t>(85, 1)), preset_f(),
                            Frequency::from_digits(std::vector<std::int64_t>(45, 2)), preset_g()},
                           0.05, 0.05, 1, 200, match::Branch::Bounded, false, name};
    }
    if (name == "contrast-equal-jumps") {
        auto digits = unbounded_digit_list();
        return MatchPreset{{Frequency::from_digits(digits), preset_f(),
                            Frequency::from_digits(digits), preset_f()},
                           0.05, 0.05, 1, 200, match::Branch::Unbounded, true, name};
    }
    throw ConfigError("unknown preset: " + name);
}

Observable default_observable() {
    Observable o;
    o.const_x = 0.0;
    o.in_x = {{1, 1.0, 0.0}};
    o.const_s = 1.0;
    return o;
}

}  // namespace rigidity
