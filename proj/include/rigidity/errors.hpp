#pragma once

#include <stdexcept>
#include <string>

namespace rigidity {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define RIGIDITY_ERROR(Name)                                        \
    struct Name : Error {                                           \
        explicit Name(const std::string& what) : Error(what) {}     \
    }

RIGIDITY_ERROR(NotInUnitInterval);
RIGIDITY_ERROR(PrecisionExhausted);
RIGIDITY_ERROR(InsufficientDepth);
RIGIDITY_ERROR(NonfiniteVariation);
RIGIDITY_ERROR(ZeroJump);
RIGIDITY_ERROR(HorizonOverflow);
RIGIDITY_ERROR(ArcTooWide);
RIGIDITY_ERROR(ScaleUnavailable);
RIGIDITY_ERROR(EpsilonTooLarge);
RIGIDITY_ERROR(CaseFallthrough);
RIGIDITY_ERROR(NonzeroJump);
RIGIDITY_ERROR(NonzeroMean);
RIGIDITY_ERROR(SmallDivisorUnderflow);
RIGIDITY_ERROR(ConfigError);

#undef RIGIDITY_ERROR

}  // namespace rigidity
