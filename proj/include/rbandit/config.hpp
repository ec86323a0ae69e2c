#pragma once

#include <iosfwd>
#include <string>

#include "rbandit/harness.hpp"

namespace rbandit {

/// Reads a flat `key = value` experiment file.
///
/// One pair per line; `#` starts a comment; blank lines are skipped. Keys:
///
///   K d horizon num_runs env_sigma0 env_sigma env_lambda policies seed
///   context_kind lowrank_noise perturb perturb_u_max output_path
///   hyper_mode warmup_rounds threads
///
/// `policies` is a comma-separated list of PolicySpec texts, e.g.
/// `lin_ts, rolin_ts:0.25`. Unknown or repeated keys, malformed values and
/// an invalid resulting config all throw ConfigError naming the line.
ExperimentConfig parse_config(std::istream& in);

ExperimentConfig load_config(const std::string& path);

/// Inverse of parse_config for every key.
void write_config(std::ostream& out, const ExperimentConfig& cfg);

}  // namespace rbandit
