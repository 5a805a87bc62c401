#pragma once

#include <cstdint>
#include <random>

namespace geb {

// mt19937_64 is fully specified by the standard, but the distributions are
// not; converting by hand keeps generated data identical across platforms.
inline double uniform01(std::mt19937_64& gen)
{
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(gen);
}

} // namespace geb
