#include "ctgibbs/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "ctgibbs/errors.hpp"
#include "ctgibbs/gibbs.hpp"
#include "ctgibbs/ldp.hpp"
#include "ctgibbs/montecarlo.hpp"
#include "ctgibbs/symbolic.hpp"

namespace ctgibbs {
namespace fs = std::filesystem;
namespace {

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void text(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    written_.push_back(p);
  }
  void json(const std::string& name, const Json& doc) { text(name, doc.dump(2) + "\n"); }

  std::vector<fs::path> written() && { return std::move(written_); }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

double number_or(const Json& doc, const std::string& key, double fallback) {
  return doc.contains(key) ? doc.at(key).get<double>() : fallback;
}

std::size_t count_or(const Json& doc, const std::string& key, std::size_t fallback) {
  return doc.contains(key) ? doc.at(key).get<std::size_t>() : fallback;
}

double required_number(const Json& doc, const std::string& key, const std::string& command) {
  if (!doc.contains(key)) throw ArgumentError(key + ": required by the " + command + " command");
  return doc.at(key).get<double>();
}

Json header(const std::string& command, const ExperimentConfig& cfg) {
  return Json{{"command", command}, {"space", space_to_json(cfg.space)}};
}

void merge(Json& into, const Json& from) {
  for (const auto& [k, v] : from.items()) into[k] = v;
}

Json candidate_json(const AdmissibleCandidate& cand) {
  return Json{{"gamma", values_to_json(cand.gamma.values())},
              {"kernel", kernel_to_json(cand.kernel)},
              {"stationary", values_to_json(cand.stationary.mass())}};
}

void cmd_solve(const ExperimentConfig& cfg, Outputs& out) {
  const PerronSolution sol = cfg.rate ? perron_solve(cfg.base, *cfg.rate, cfg.V) : perron_solve(cfg.base, cfg.V);
  Json doc = header("solve", cfg);
  merge(doc, to_json(sol));
  if (!cfg.rate) doc["eigen_equation_residual"] = eigen_equation_check(sol, cfg.base, cfg.V);
  out.json("solution.json", doc);
}

void cmd_gibbs(const ExperimentConfig& cfg, Outputs& out) {
  const GibbsChain chain = build_gibbs(cfg.base, cfg.V);
  const EigenprobabilityCheck check = eigenprobability_relation(chain);
  Json doc = header("gibbs", cfg);
  merge(doc, to_json(chain));
  doc["eigenprobability"] = Json{{"residual", check.residual}, {"distance_to_nu", check.distance_to_nu}};
  out.json("gibbs.json", doc);
}

void cmd_entropy(const ExperimentConfig& cfg, Outputs& out) {
  const AdmissibleCandidate cand = candidate_from_config(cfg);
  const double h = relative_entropy(cand, cfg.base);
  const double iv = cand.stationary.integrate(cfg.V);
  Json doc = header("entropy", cfg);
  doc["entropy"] = h;
  doc["integral_V"] = iv;
  doc["value"] = h + iv;
  doc["lambda"] = scgf(cfg.base, cfg.V);
  doc["candidate"] = candidate_json(cand);
  out.json("entropy.json", doc);
}

void cmd_pressure_audit(const ExperimentConfig& cfg, Outputs& out) {
  const std::size_t count = count_or(cfg.doc, "audit_count", 20);
  const double tol = number_or(cfg.doc, "tolerance", 1e-9);
  const PressureReport report = pressure(cfg.base, cfg.V, count, cfg.seed);
  double worst = 0.0;
  for (const auto& a : report.audits) worst = std::max(worst, -a.gap);
  Json doc = header("pressure-audit", cfg);
  doc["seed"] = cfg.seed;
  doc["tolerance"] = tol;
  merge(doc, to_json(report));
  doc["max_violation"] = worst;
  doc["variational_ok"] = worst <= tol && std::abs(report.gibbs_value - report.lambda) <= tol;
  out.json("pressure_audit.json", doc);
}

std::vector<Measure> rate_measures(const ExperimentConfig& cfg) {
  const Json& doc = cfg.doc;
  std::vector<Measure> out;
  if (doc.contains("nu")) out.emplace_back(cfg.space, values_from_json(doc.at("nu"), "nu"));
  if (doc.contains("measures"))
    for (std::size_t i = 0; i < doc.at("measures").size(); ++i)
      out.emplace_back(cfg.space, values_from_json(doc.at("measures")[i], "measures[" + std::to_string(i) + "]"));
  if (doc.contains("segment")) {
    const Json& seg = doc.at("segment");
    const std::vector<double> from = values_from_json(seg.at("from"), "segment.from");
    const std::vector<double> to = values_from_json(seg.at("to"), "segment.to");
    const std::size_t points = seg.at("points").get<std::size_t>();
    for (std::size_t i = 0; i < points; ++i) {
      const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
      std::vector<double> m(from.size());
      for (std::size_t x = 0; x < m.size(); ++x) m[x] = i + 1 == points && points > 1 ? to[x] : (1.0 - t) * from[x] + t * to[x];
      out.emplace_back(cfg.space, std::move(m));
    }
  }
  if (out.empty()) throw ArgumentError("nu: the rate command needs nu, measures or segment");
  return out;
}

void cmd_rate(const ExperimentConfig& cfg, Outputs& out) {
  std::string csv;
  for (Word x = 0; x < cfg.space.size(); ++x) csv += "nu_" + cfg.space.label(x) + ",";
  csv += "I_primal,I_dual,gap\n";
  Json rows = Json::array();
  for (const Measure& nu : rate_measures(cfg)) {
    const RateFunctionResult primal = rate_primal(cfg.base, nu);
    const RateFunctionResult dual = rate_dual(cfg.base, nu);
    const double gap = std::abs(primal.value - dual.value);
    for (double m : nu.mass()) csv += format_number(m) + ",";
    csv += format_number(primal.value) + "," + format_number(dual.value) + "," + format_number(gap) + "\n";
    rows.push_back(Json{{"nu", values_to_json(nu.mass())}, {"primal", to_json(primal)}, {"dual", to_json(dual)}, {"gap", gap}});
  }
  Json doc = header("rate", cfg);
  doc["rows"] = rows;
  out.text("rate.csv", csv);
  out.json("rate.json", doc);
}

void cmd_simulate(const ExperimentConfig& cfg, Outputs& out) {
  const double T = required_number(cfg.doc, "T", "simulate");
  const std::string chain_name = cfg.doc.value("chain", std::string("base"));
  AdmissibleCandidate chain = chain_name == "base"    ? AdmissibleCandidate::base(cfg.base)
                              : chain_name == "gibbs" ? build_gibbs(cfg.base, cfg.V).candidate()
                                                      : candidate_from_config(cfg);
  CounterRng rng(cfg.seed);
  const Word x0 = cfg.doc.contains("x0") ? cfg.doc.at("x0").get<Word>() : rng.categorical(chain.stationary.mass());
  const Trajectory traj = simulate(chain.gamma, chain.kernel, x0, T, rng);
  Json doc = header("simulate", cfg);
  doc["chain"] = chain_name;
  doc["seed"] = cfg.seed;
  doc["x0"] = x0;
  doc["T"] = T;
  doc["jumps"] = traj.jumps();
  doc["empirical_measure"] = values_to_json(empirical_measure(traj).mass());
  doc["stationary"] = values_to_json(chain.stationary.mass());
  out.text("trajectory.csv", trajectory_csv(traj));
  out.json("empirical_measure.json", doc);
}

void cmd_mc(const ExperimentConfig& cfg, Outputs& out) {
  const double T = number_or(cfg.doc, "T", 100.0);
  const std::size_t n = count_or(cfg.doc, "n_traj", 1000);
  std::vector<std::string> estimators = {"scgf", "entropy", "martingale"};
  if (cfg.doc.contains("estimators")) estimators = cfg.doc.at("estimators").get<std::vector<std::string>>();
  Json doc = header("mc", cfg);
  doc["seed"] = cfg.seed;
  doc["T"] = T;
  doc["n_traj"] = n;
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    const std::string& name = estimators[e];
    const std::uint64_t seed = derive_seed(cfg.seed, e);
    if (name == "scgf") {
      const std::string sampler = cfg.doc.value("scgf_sampler", std::string("base"));
      Json r = to_json(mc_scgf(cfg.base, cfg.V, T, n, seed,
                               sampler == "base" ? ScgfSampler::base : ScgfSampler::gibbs_importance));
      r["sampler"] = sampler;
      r["lambda"] = scgf(cfg.base, cfg.V);
      r["finite_horizon"] = finite_horizon_scgf(cfg.base, cfg.V, T);
      doc["scgf"] = r;
    } else if (name == "entropy") {
      const AdmissibleCandidate cand = candidate_from_config(cfg);
      Json r = to_json(mc_entropy(cfg.base, cand, T, n, seed));
      r["analytic"] = relative_entropy(cand, cfg.base);
      doc["entropy"] = r;
    } else {
      const PotentialField G = cfg.doc.contains("observable")
                                   ? potential_from_json(cfg.doc.at("observable"), cfg.space, "observable")
                                   : PotentialField::constant(cfg.space, 1.0);
      doc["martingale"] = to_json(martingale_check(candidate_from_config(cfg), G, T, n, seed));
    }
  }
  out.json("mc.json", doc);
}

void cmd_anneal(const ExperimentConfig& cfg, Outputs& out) {
  const std::vector<double> betas = cfg.doc.contains("betas") ? cfg.doc.at("betas").get<std::vector<double>>()
                                                              : std::vector<double>{0.0, 1.0, 2.0, 5.0, 10.0};
  const double T = number_or(cfg.doc, "T_per_stage", 50.0);
  const std::size_t n = count_or(cfg.doc, "n_traj", 1000);
  const AnnealReport report = anneal(cfg.base, cfg.V, betas, T, n, cfg.seed);
  std::string csv = "beta,analytic_mass,empirical_mass,empirical_se,lambda,gap\n";
  for (const auto& s : report.stages)
    csv += format_number(s.beta) + "," + format_number(s.analytic_mass) + "," + format_number(s.empirical_mass.estimate) +
           "," + format_number(s.empirical_mass.std_error) + "," + format_number(s.lambda) + "," + format_number(s.gap) +
           "\n";
  Json doc = header("anneal", cfg);
  doc["seed"] = cfg.seed;
  doc["T_per_stage"] = T;
  doc["n_traj"] = n;
  merge(doc, to_json(report, cfg.space));
  out.text("anneal.csv", csv);
  out.json("anneal.json", doc);
}

using Handler = std::function<void(const ExperimentConfig&, Outputs&)>;

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> table = {
      {"solve", cmd_solve},   {"gibbs", cmd_gibbs},       {"entropy", cmd_entropy}, {"pressure-audit", cmd_pressure_audit},
      {"rate", cmd_rate},     {"simulate", cmd_simulate}, {"mc", cmd_mc},           {"anneal", cmd_anneal}};
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, _] : handlers()) v.push_back(name);
    v.emplace_back("validate");
    return v;
  }();
  return names;
}

std::vector<fs::path> run(const std::string& command, const ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto& table = handlers();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& h) { return h.first == command; });
  if (it == table.end()) throw ArgumentError("unknown command \"" + command + "\"");
  if (cfg.rate && command != "solve") throw ArgumentError("rate: only the solve command accepts a general rate");
  Outputs out(out_dir);
  it->second(cfg, out);
  return std::move(out).written();
}

}  // namespace ctgibbs
