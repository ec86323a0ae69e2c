#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace rbandit {

/// Random engine used everywhere. Every stochastic operation takes one by
/// reference so a run is a pure function of its seed.
using Rng = std::mt19937_64;

/// Invalid dimensions, hyper-parameters or experiment settings.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A linear solve or factorization failed.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough observations to form an estimate.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Prior and noise configuration of the reward model.
///
///   theta ~ N(0, lambda^-1 I_d),  v_i ~ N(0, sigma0_sq),  eps ~ N(0, sigma_sq)
///
/// `horizon` is the number of rounds n; the UCB width depends on it.
struct HyperParams {
    double lambda = 1.0;
    double sigma0_sq = 0.0;
    double sigma_sq = 1.0;
    int horizon = 1;

    /// Throws ConfigError unless lambda > 0, sigma_sq > 0, sigma0_sq >= 0
    /// and horizon >= 1.
    void validate() const;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent substream identified by (master, run, stream).
///
/// Each coordinate is folded in through mix64 in turn, so substreams for
/// different runs or streams do not overlap in any simple arithmetic way and
/// adding a new stream id leaves the others untouched.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, std::uint64_t stream);

/// Decimal text with 17 significant digits, enough to round-trip a double.
std::string format_double(double value);

}  // namespace rbandit
