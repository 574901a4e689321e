#include "ctgibbs/io.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "ctgibbs/errors.hpp"

namespace ctgibbs {
namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const Json& require(const Json& doc, const std::string& key, const std::string& path) {
  if (!doc.is_object() || !doc.contains(key)) throw ArgumentError(join(path, key) + ": missing");
  return doc.at(key);
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ArgumentError(path + ": expected a number");
  return v.get<double>();
}

// Emitted as null when not finite; read back as -inf.
Json optional_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
double read_optional_number(const Json& v) {
  return v.is_null() ? -std::numeric_limits<double>::infinity() : v.get<double>();
}

int integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ArgumentError(path + ": expected an integer");
  return v.get<int>();
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json space_to_json(const CylinderSpace& space) {
  return Json{{"d", space.alphabet()}, {"k", space.depth()}, {"theta", space.theta()}};
}

CylinderSpace space_from_json(const Json& doc) {
  const int d = integer(require(doc, "d", ""), "d");
  const int k = integer(require(doc, "k", ""), "k");
  const double theta = doc.contains("theta") ? number(doc.at("theta"), "theta") : 0.5;
  return CylinderSpace(d, k, theta);
}

Json values_to_json(std::span<const double> values) {
  Json out = Json::array();
  for (double v : values) out.push_back(v);
  return out;
}

std::vector<double> values_from_json(const Json& array, const std::string& path) {
  if (!array.is_array()) throw ArgumentError(path + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(array.size());
  for (std::size_t i = 0; i < array.size(); ++i) out.push_back(number(array[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

PotentialField potential_from_json(const Json& doc, const CylinderSpace& space, const std::string& path) {
  if (!doc.is_object()) throw ArgumentError(path + ": expected an object");
  if (doc.contains("d") && integer(doc.at("d"), join(path, "d")) != space.alphabet())
    throw ArgumentError(join(path, "d") + ": does not match the space");
  if (doc.contains("k") && integer(doc.at("k"), join(path, "k")) != space.depth())
    throw ArgumentError(join(path, "k") + ": does not match the space");
  if (doc.contains("values")) {
    std::vector<double> v = values_from_json(doc.at("values"), join(path, "values"));
    if (v.size() != space.size())
      throw ArgumentError(join(path, "values") + ": expected " + std::to_string(space.size()) + " entries, got " +
                          std::to_string(v.size()));
    return PotentialField(space, std::move(v));
  }
  if (doc.contains("rule")) {
    const Json& rule = doc.at("rule");
    if (!rule.is_string() || rule.get<std::string>() != "first_m_symbols")
      throw ArgumentError(join(path, "rule") + ": only \"first_m_symbols\" is supported");
    const std::vector<double> table = values_from_json(require(doc, "table", path), join(path, "table"));
    std::size_t m_size = 1;
    bool matched = false;
    for (int m = 0; m <= space.depth(); ++m, m_size *= static_cast<std::size_t>(space.alphabet())) {
      if (table.size() == m_size) {
        matched = true;
        break;
      }
      if (space.alphabet() == 1) break;
    }
    if (!matched) throw ArgumentError(join(path, "table") + ": length must be d^m for some m <= k");
    return PotentialField::first_symbols(space, table);
  }
  throw ArgumentError(path + ": expected \"values\" or \"rule\"");
}

Json potential_document(const PotentialField& f) {
  Json doc = space_to_json(f.space());
  doc["values"] = values_to_json(f.values());
  return doc;
}

PotentialField potential_document_from_json(const Json& doc) {
  return potential_from_json(doc, space_from_json(doc), "");
}

Json kernel_to_json(const KernelField& kernel) {
  Json rows = Json::array();
  for (Word x = 0; x < kernel.space().size(); ++x) rows.push_back(values_to_json(kernel.row(x)));
  return rows;
}

KernelField kernel_from_json(const Json& rows, const CylinderSpace& space, const std::string& path) {
  if (!rows.is_array() || rows.size() != space.size())
    throw ArgumentError(path + ": expected " + std::to_string(space.size()) + " rows");
  std::vector<double> w;
  w.reserve(space.size() * static_cast<std::size_t>(space.alphabet()));
  for (std::size_t x = 0; x < rows.size(); ++x) {
    const std::string row_path = path + "[" + std::to_string(x) + "]";
    const std::vector<double> row = values_from_json(rows[x], row_path);
    if (row.size() != static_cast<std::size_t>(space.alphabet()))
      throw ArgumentError(row_path + ": expected " + std::to_string(space.alphabet()) + " entries");
    for (double v : row)
      if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError(row_path + ": weights must be positive and finite");
    w.insert(w.end(), row.begin(), row.end());
  }
  return KernelField(space, std::move(w));
}

Json to_json(const PerronSolution& sol) {
  return Json{{"lambda", sol.lambda},
              {"F", values_to_json(sol.F.values())},
              {"nu", values_to_json(sol.nu.mass())},
              {"residual_right", sol.residual_right},
              {"residual_left", sol.residual_left},
              {"min_max_ratio", sol.min_max_ratio},
              {"iterations", sol.iterations}};
}

PerronSolution perron_solution_from_json(const Json& doc, const CylinderSpace& space) {
  PerronSolution sol{number(require(doc, "lambda", ""), "lambda"),
                     PotentialField(space, values_from_json(require(doc, "F", ""), "F")),
                     Measure(space, values_from_json(require(doc, "nu", ""), "nu")),
                     number(require(doc, "residual_right", ""), "residual_right"),
                     number(require(doc, "residual_left", ""), "residual_left"),
                     number(require(doc, "min_max_ratio", ""), "min_max_ratio"),
                     require(doc, "iterations", "").get<std::size_t>()};
  return sol;
}

Json to_json(const GibbsChain& chain) {
  return Json{{"lambda", chain.lambda()},
              {"base_kernel", kernel_to_json(chain.base)},
              {"V", values_to_json(chain.V.values())},
              {"solution", to_json(chain.solution)},
              {"gamma", values_to_json(chain.gamma.values())},
              {"kernel", kernel_to_json(chain.kernel)},
              {"stationary", values_to_json(chain.stationary.mass())}};
}

GibbsChain gibbs_chain_from_json(const Json& doc, const CylinderSpace& space) {
  return GibbsChain{kernel_from_json(require(doc, "base_kernel", ""), space, "base_kernel"),
                    PotentialField(space, values_from_json(require(doc, "V", ""), "V")),
                    perron_solution_from_json(require(doc, "solution", ""), space),
                    PotentialField(space, values_from_json(require(doc, "gamma", ""), "gamma")),
                    kernel_from_json(require(doc, "kernel", ""), space, "kernel"),
                    Measure(space, values_from_json(require(doc, "stationary", ""), "stationary"))};
}

Json to_json(const McEstimate& e) {
  return Json{{"estimate", e.estimate}, {"std_error", e.std_error}, {"n_traj", e.n_traj}};
}

McEstimate mc_estimate_from_json(const Json& doc) {
  return {number(require(doc, "estimate", ""), "estimate"), number(require(doc, "std_error", ""), "std_error"),
          require(doc, "n_traj", "").get<std::size_t>()};
}

Json to_json(const PressureReport& report) {
  Json audits = Json::array();
  for (const auto& a : report.audits)
    audits.push_back(Json{{"seed", a.seed}, {"entropy", a.entropy}, {"integral_V", a.integral_V}, {"gap", a.gap}});
  return Json{{"lambda", report.lambda},
              {"gibbs_entropy", report.gibbs_entropy},
              {"gibbs_value", report.gibbs_value},
              {"audit_max", optional_number(report.audit_max)},
              {"audits", audits}};
}

PressureReport pressure_report_from_json(const Json& doc) {
  PressureReport r{number(require(doc, "lambda", ""), "lambda"),
                   number(require(doc, "gibbs_entropy", ""), "gibbs_entropy"),
                   number(require(doc, "gibbs_value", ""), "gibbs_value"),
                   read_optional_number(require(doc, "audit_max", "")),
                   {}};
  for (const auto& a : require(doc, "audits", ""))
    r.audits.push_back({a.at("seed").get<std::uint64_t>(), a.at("entropy").get<double>(),
                        a.at("integral_V").get<double>(), a.at("gap").get<double>()});
  return r;
}

Json to_json(const RateFunctionResult& r) {
  Json doc{{"value", r.value},
           {"route", r.route == RateRoute::primal ? "primal" : "dual"},
           {"attained", r.attained},
           {"iterations", r.iterations},
           {"gradient_norm", r.gradient_norm},
           {"potential", values_to_json(r.potential)}};
  if (r.route == RateRoute::dual) {
    doc["optimal_measure"] = values_to_json(r.optimal_measure);
    doc["tv_to_target"] = r.tv_to_target;
  }
  return doc;
}

Json to_json(const MartingaleReport& r) {
  return Json{{"jump_sum", to_json(r.jump_sum)},
              {"compensator", to_json(r.compensator)},
              {"difference", r.difference},
              {"combined_se", r.combined_se},
              {"within_3se", r.within_3se}};
}

Json to_json(const AnnealReport& r, const CylinderSpace& space) {
  Json argmax = Json::array();
  for (Word w : r.argmax) argmax.push_back(Json{{"index", w}, {"label", space.label(w)}});
  Json stages = Json::array();
  for (const auto& s : r.stages)
    stages.push_back(Json{{"beta", s.beta},
                          {"analytic_mass", s.analytic_mass},
                          {"empirical_mass", to_json(s.empirical_mass)},
                          {"lambda", s.lambda},
                          {"gap", s.gap}});
  return Json{{"argmax", argmax}, {"degenerate", r.degenerate}, {"stages", stages}};
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "time,word\n0," + traj.space.label(traj.x0) + "\n";
  for (std::size_t n = 0; n < traj.jumps(); ++n)
    out += format_number(traj.jump_times[n]) + "," + traj.space.label(traj.states[n + 1]) + "\n";
  return out;
}

}  // namespace ctgibbs
