#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctgibbs/io.hpp"

namespace ctgibbs {

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity;
  std::string path;  ///< dotted field path, e.g. "V.values"
  std::string message;
};

/// Schema and semantic checks. Never throws and never modifies the document.
std::vector<Diagnostic> validate(const Json& config);

Json to_json(const Diagnostic& d);

/// A parsed experiment. Command-specific keys stay in `doc` and are read by
/// the command that needs them, with defaults.
struct ExperimentConfig {
  Json doc;
  CylinderSpace space;
  KernelField base;  ///< normalized a-priori kernel
  PotentialField V;  ///< zero when absent
  std::optional<PotentialField> rate;
  std::uint64_t seed = 1;
};

/// Throws ArgumentError carrying every error diagnostic when validation fails.
ExperimentConfig parse_config(const Json& config);

/// The candidate named by "candidate": "gibbs" (default), "base", or
/// {gamma: potential, kernel: A-style spec or "A" for the a-priori kernel}.
AdmissibleCandidate candidate_from_config(const ExperimentConfig& cfg);

}  // namespace ctgibbs
