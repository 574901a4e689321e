#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ctgibbs/gibbs.hpp"
#include "ctgibbs/ldp.hpp"
#include "ctgibbs/montecarlo.hpp"
#include "ctgibbs/semigroup.hpp"

namespace ctgibbs {

/// Documents keep keys in insertion order so emitted files are stable.
using Json = nlohmann::ordered_json;

/// Shortest text that parses back to the same double.
std::string format_number(double v);

Json space_to_json(const CylinderSpace& space);
CylinderSpace space_from_json(const Json& doc);

/// Accepts {values: [d^k reals]} or {rule: "first_m_symbols", table: [d^m reals]}.
/// Optional d, k, theta must agree with `space`. Throws ArgumentError naming
/// the offending field relative to `path`.
PotentialField potential_from_json(const Json& doc, const CylinderSpace& space, const std::string& path = "");
/// Self-contained potential document: {d, k, theta, values}.
Json potential_document(const PotentialField& f);
PotentialField potential_document_from_json(const Json& doc);

/// Rows of weights, one row of d entries per parent word.
Json kernel_to_json(const KernelField& kernel);
KernelField kernel_from_json(const Json& rows, const CylinderSpace& space, const std::string& path = "");

Json values_to_json(std::span<const double> values);
std::vector<double> values_from_json(const Json& array, const std::string& path = "");

Json to_json(const PerronSolution& sol);
PerronSolution perron_solution_from_json(const Json& doc, const CylinderSpace& space);

Json to_json(const GibbsChain& chain);
GibbsChain gibbs_chain_from_json(const Json& doc, const CylinderSpace& space);

Json to_json(const McEstimate& e);
McEstimate mc_estimate_from_json(const Json& doc);

Json to_json(const PressureReport& report);
PressureReport pressure_report_from_json(const Json& doc);

Json to_json(const RateFunctionResult& r);

Json to_json(const MartingaleReport& r);
Json to_json(const AnnealReport& r, const CylinderSpace& space);

/// `time,word` rows with word labels: (0, x0) followed by one row per jump.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace ctgibbs
