#pragma once

#include <cstdint>
#include <random>

#include "lplab/grid.hpp"

namespace lplab::testing {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) {
        double u = (gen() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }
    int integer(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

inline GridFunction random_function(const DomainSpec& d, Rng& rng, double lo = -1.0,
                                    double hi = 1.0) {
    Array s(d.total_cells());
    for (long i = 0; i < s.size(); ++i) s[i] = rng.uniform(lo, hi);
    return GridFunction(d, std::move(s));
}

inline GridFunction random_weight(const DomainSpec& d, Rng& rng, double lo = 0.2,
                                  double hi = 3.0) {
    Array s(d.total_cells());
    for (long i = 0; i < s.size(); ++i) s[i] = rng.uniform(lo, hi);
    return GridFunction(d, std::move(s), true);
}

}  // namespace lplab::testing
