#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ctgibbs/config.hpp"

namespace ctgibbs {

/// Commands accepted by run(), in help order.
const std::vector<std::string>& command_names();

/// Runs one experiment and writes its artifacts into out_dir (created if
/// needed). Returns the written files in write order. Throws ArgumentError
/// for unknown commands or missing command parameters; numeric and property
/// failures propagate from the library.
std::vector<std::filesystem::path> run(const std::string& command, const ExperimentConfig& cfg,
                                       const std::filesystem::path& out_dir);

}  // namespace ctgibbs
