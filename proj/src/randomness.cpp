#include "annsim/randomness.hpp"

#include <cmath>
#include <stdexcept>

namespace annsim {

std::uint64_t bernoulli_threshold(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("Bernoulli rate must lie in [0, 1]");
    return static_cast<std::uint64_t>(std::ldexp(p, 53));
}

}  // namespace annsim
