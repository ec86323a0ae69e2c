#include "rbandit/types.hpp"

#include <cmath>
#include <cstdio>

namespace rbandit {

void HyperParams::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw ConfigError("lambda must be positive");
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq))
        throw ConfigError("sigma_sq must be positive");
    if (!(sigma0_sq >= 0.0) || !std::isfinite(sigma0_sq))
        throw ConfigError("sigma0_sq must be nonnegative");
    if (horizon < 1)
        throw ConfigError("horizon must be at least 1");
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, std::uint64_t stream) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ run);
    h = mix64(h ^ (stream + 0x632be59bd9b4e019ULL));
    return h;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

}  // namespace rbandit
