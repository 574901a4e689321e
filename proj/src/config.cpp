#include "ctgibbs/config.hpp"

#include <cmath>
#include <functional>
#include <set>

#include "ctgibbs/errors.hpp"
#include "ctgibbs/symbolic.hpp"

namespace ctgibbs {
namespace {

const std::set<std::string> kKnownKeys = {
    "space", "A",    "V",        "rate",  "candidate", "observable", "T",         "n_traj",     "seed",
    "betas", "T_per_stage", "audit_count", "tolerance", "nu", "measures", "segment", "x0", "chain",
    "estimators", "scgf_sampler"};

class Checker {
 public:
  explicit Checker(std::vector<Diagnostic>& out) : out_(out) {}

  void error(const std::string& path, const std::string& msg) { out_.push_back({Severity::error, path, msg}); }
  void warning(const std::string& path, const std::string& msg) { out_.push_back({Severity::warning, path, msg}); }

  // Runs a parser that reports problems as "path: message" ArgumentErrors.
  template <class Fn>
  bool attempt(const std::string& fallback_path, Fn&& fn) {
    try {
      fn();
      return true;
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      const auto colon = what.find(": ");
      if (colon == std::string::npos) error(fallback_path, what);
      else error(what.substr(0, colon), what.substr(colon + 2));
      return false;
    } catch (const std::exception& e) {
      error(fallback_path, e.what());
      return false;
    }
  }

  void positive_number(const Json& doc, const std::string& key) {
    if (!doc.contains(key)) return;
    const Json& v = doc.at(key);
    if (!v.is_number() || !(v.get<double>() > 0.0) || !std::isfinite(v.get<double>()))
      error(key, "must be a positive number");
  }

  void integer_at_least(const Json& doc, const std::string& key, long long lo) {
    if (!doc.contains(key)) return;
    const Json& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < lo)
      error(key, "must be an integer >= " + std::to_string(lo));
  }

  void one_of(const Json& doc, const std::string& key, const std::set<std::string>& allowed) {
    if (!doc.contains(key)) return;
    const Json& v = doc.at(key);
    if (!v.is_string() || !allowed.count(v.get<std::string>())) error(key, "must be one of " + listing(allowed));
  }

  void probability(const Json& v, const CylinderSpace& space, const std::string& path) {
    attempt(path, [&] {
      const std::vector<double> m = values_from_json(v, path);
      if (m.size() != space.size())
        throw ArgumentError(path + ": expected " + std::to_string(space.size()) + " entries, got " +
                            std::to_string(m.size()));
      double total = 0.0;
      for (double x : m) {
        if (x < 0.0) throw ArgumentError(path + ": entries must be nonnegative");
        total += x;
      }
      if (std::abs(total - 1.0) > 1e-10) throw ArgumentError(path + ": entries must sum to 1");
    });
  }

  static std::string listing(const std::set<std::string>& allowed) {
    std::string s;
    for (const auto& a : allowed) s += (s.empty() ? "" : ", ") + ("\"" + a + "\"");
    return s;
  }

 private:
  std::vector<Diagnostic>& out_;
};

KernelField kernel_spec(const Json& doc, const CylinderSpace& space, const std::string& path) {
  if (!doc.is_object()) throw ArgumentError(path + ": expected an object");
  if (doc.contains("weights"))
    return normalize(kernel_from_json(doc.at("weights"), space, path + ".weights"));
  return normalize(potential_from_json(doc, space, path));
}

PotentialField positive_potential(const Json& doc, const CylinderSpace& space, const std::string& path) {
  PotentialField f = potential_from_json(doc, space, path);
  if (!(f.min() > 0.0)) throw ArgumentError(path + ": values must be strictly positive");
  return f;
}

}  // namespace

Json to_json(const Diagnostic& d) {
  return Json{{"severity", d.severity == Severity::error ? "error" : "warning"}, {"path", d.path}, {"message", d.message}};
}

std::vector<Diagnostic> validate(const Json& config) {
  std::vector<Diagnostic> out;
  Checker c(out);
  if (!config.is_object()) {
    c.error("", "config must be a JSON object");
    return out;
  }
  for (const auto& [key, _] : config.items())
    if (!kKnownKeys.count(key)) c.warning(key, "unknown key is ignored");

  std::optional<CylinderSpace> space;
  if (!config.contains("space")) {
    c.error("space", "missing");
  } else {
    const Json& s = config.at("space");
    const bool d_ok = s.is_object() && s.contains("d") && s.at("d").is_number_integer() && s.at("d").get<long long>() >= 1;
    const bool k_ok = s.is_object() && s.contains("k") && s.at("k").is_number_integer() && s.at("k").get<long long>() >= 1;
    if (!d_ok) c.error("space.d", "must be an integer >= 1");
    if (!k_ok) c.error("space.k", "must be an integer >= 1");
    if (s.is_object() && s.contains("theta")) {
      const Json& t = s.at("theta");
      if (!t.is_number() || !(t.get<double>() > 0.0) || !(t.get<double>() < 1.0))
        c.error("space.theta", "must lie in (0, 1)");
      else if (t.get<double>() > 0.5)
        c.warning("space.theta", "the regularity estimates assume theta <= 1/2");
    }
    if (d_ok && k_ok)
      c.attempt("space", [&] { space = space_from_json(s); });
  }

  c.positive_number(config, "T");
  c.positive_number(config, "T_per_stage");
  c.positive_number(config, "tolerance");
  c.integer_at_least(config, "n_traj", 2);
  c.integer_at_least(config, "seed", 0);
  c.integer_at_least(config, "audit_count", 0);
  c.one_of(config, "chain", {"base", "gibbs", "candidate"});
  c.one_of(config, "scgf_sampler", {"base", "gibbs_importance"});

  if (config.contains("betas")) {
    const Json& b = config.at("betas");
    bool ok = b.is_array() && !b.empty();
    for (std::size_t i = 0; ok && i < b.size(); ++i) {
      ok = b[i].is_number() && b[i].get<double>() >= 0.0 && std::isfinite(b[i].get<double>()) &&
           (i == 0 || b[i].get<double>() > b[i - 1].get<double>());
    }
    if (!ok) c.error("betas", "must be a non-empty strictly increasing array of nonnegative numbers");
  }
  if (config.contains("estimators")) {
    const std::set<std::string> allowed = {"scgf", "entropy", "martingale"};
    const Json& e = config.at("estimators");
    bool ok = e.is_array() && !e.empty();
    for (std::size_t i = 0; ok && i < e.size(); ++i) ok = e[i].is_string() && allowed.count(e[i].get<std::string>());
    if (!ok) c.error("estimators", "must be a non-empty array drawn from " + Checker::listing(allowed));
  }

  if (!space) return out;
  const CylinderSpace& s = *space;
  if (config.contains("A")) c.attempt("A", [&] { kernel_spec(config.at("A"), s, "A"); });
  if (config.contains("V")) c.attempt("V", [&] { potential_from_json(config.at("V"), s, "V"); });
  if (config.contains("rate")) c.attempt("rate", [&] { positive_potential(config.at("rate"), s, "rate"); });
  if (config.contains("observable"))
    c.attempt("observable", [&] { potential_from_json(config.at("observable"), s, "observable"); });
  if (config.contains("candidate")) {
    const Json& cand = config.at("candidate");
    if (cand.is_string()) {
      c.one_of(config, "candidate", {"gibbs", "base"});
    } else if (cand.is_object()) {
      if (!cand.contains("gamma")) c.error("candidate.gamma", "missing");
      else c.attempt("candidate.gamma", [&] { positive_potential(cand.at("gamma"), s, "candidate.gamma"); });
      if (!cand.contains("kernel")) c.error("candidate.kernel", "missing");
      else if (cand.at("kernel") != Json("A"))
        c.attempt("candidate.kernel", [&] { kernel_spec(cand.at("kernel"), s, "candidate.kernel"); });
    } else {
      c.error("candidate", "must be \"gibbs\", \"base\" or an object with gamma and kernel");
    }
  }
  if (config.contains("x0")) {
    const Json& x = config.at("x0");
    if (!x.is_number_integer() || x.get<long long>() < 0 || static_cast<std::size_t>(x.get<long long>()) >= s.size())
      c.error("x0", "must be a word index in [0, " + std::to_string(s.size()) + ")");
  }
  if (config.contains("nu")) c.probability(config.at("nu"), s, "nu");
  if (config.contains("measures")) {
    const Json& m = config.at("measures");
    if (!m.is_array() || m.empty()) c.error("measures", "must be a non-empty array of measures");
    else
      for (std::size_t i = 0; i < m.size(); ++i) c.probability(m[i], s, "measures[" + std::to_string(i) + "]");
  }
  if (config.contains("segment")) {
    const Json& seg = config.at("segment");
    if (!seg.is_object()) {
      c.error("segment", "must be an object with from, to and points");
    } else {
      if (!seg.contains("from")) c.error("segment.from", "missing");
      else c.probability(seg.at("from"), s, "segment.from");
      if (!seg.contains("to")) c.error("segment.to", "missing");
      else c.probability(seg.at("to"), s, "segment.to");
      if (!seg.contains("points") || !seg.at("points").is_number_integer() || seg.at("points").get<long long>() < 1)
        c.error("segment.points", "must be an integer >= 1");
    }
  }
  return out;
}

ExperimentConfig parse_config(const Json& config) {
  std::string errors;
  for (const auto& d : validate(config))
    if (d.severity == Severity::error) errors += (errors.empty() ? "" : "; ") + d.path + ": " + d.message;
  if (!errors.empty()) throw ArgumentError("invalid config: " + errors);

  CylinderSpace space = space_from_json(config.at("space"));
  KernelField base = config.contains("A") ? kernel_spec(config.at("A"), space, "A") : KernelField::uniform(space);
  PotentialField V =
      config.contains("V") ? potential_from_json(config.at("V"), space, "V") : PotentialField::constant(space, 0.0);
  std::optional<PotentialField> rate;
  if (config.contains("rate")) rate = positive_potential(config.at("rate"), space, "rate");
  const std::uint64_t seed = config.contains("seed") ? config.at("seed").get<std::uint64_t>() : 1;
  return ExperimentConfig{config, std::move(space), std::move(base), std::move(V), std::move(rate), seed};
}

AdmissibleCandidate candidate_from_config(const ExperimentConfig& cfg) {
  const Json cand = cfg.doc.contains("candidate") ? cfg.doc.at("candidate") : Json("gibbs");
  if (cand.is_string()) {
    if (cand.get<std::string>() == "base") return AdmissibleCandidate::base(cfg.base);
    return build_gibbs(cfg.base, cfg.V).candidate();
  }
  const Json& kernel = cand.at("kernel");
  return AdmissibleCandidate::make(positive_potential(cand.at("gamma"), cfg.space, "candidate.gamma"),
                                   kernel == Json("A") ? cfg.base : kernel_spec(kernel, cfg.space, "candidate.kernel"));
}

}  // namespace ctgibbs
