#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dyadic/verify.hpp"

namespace dyadic {

/// Malformed command line, spec, or configuration. Distinct from structural
/// invariant violations so the two map to different process exit codes.
struct UsageError : Error {
  using Error::Error;
};

/// Built-in tree cap, optionally lowered (never raised) by DYADIC_MAX_DEPTH.
inline int effective_max_depth() {
  int cap = DyadicTree::max_depth;
  if (const char* env = std::getenv("DYADIC_MAX_DEPTH")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1 && v < cap) cap = v;
    } catch (...) {
    }
  }
  return cap;
}

inline int checked_depth(int depth) {
  if (depth < 1 || depth > effective_max_depth())
    throw UsageError("depth must lie in [1, " + std::to_string(effective_max_depth()) + "], got " +
                     std::to_string(depth));
  return depth;
}

namespace detail {

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace detail

/// Key format "level,position" used by coefficient and sign maps.
inline DyadicIndex parse_index_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw UsageError("interval key must look like \"j,k\": " + key);
  try {
    const int level = std::stoi(key.substr(0, comma));
    const unsigned long pos = std::stoul(key.substr(comma + 1));
    if (level < 0) throw UsageError("interval level must be nonnegative: " + key);
    return {level, static_cast<std::uint32_t>(pos)};
  } catch (const UsageError&) {
    throw;
  } catch (...) {
    throw UsageError("interval key must hold two integers: " + key);
  }
}

inline std::string index_key(DyadicIndex I) {
  return std::to_string(I.level) + "," + std::to_string(I.pos);
}

/// Builds a weight from its JSON constructor. Types: "leaves" (explicit cell
/// values), "power" (cell-exact x^alpha), "random" (seeded product weight),
/// "fkp" (explicit product coefficients). The depth field falls back to the
/// caller's default where a constructor allows it.
inline StepWeight weight_from_spec(const nlohmann::json& spec, int fallback_depth) {
  if (!spec.is_object() || !spec.contains("type") || !spec["type"].is_string())
    throw UsageError("weight spec must be an object with a \"type\" string");
  const std::string type = spec["type"].get<std::string>();

  if (type == "leaves") {
    if (!spec.contains("leaves") || !spec["leaves"].is_array())
      throw UsageError("leaves spec needs a \"leaves\" array");
    std::vector<double> leaves;
    for (const auto& x : spec["leaves"]) {
      if (!x.is_number()) throw UsageError("leaf values must be numbers");
      leaves.push_back(x.get<double>());
    }
    int depth = 0;
    std::size_t n = leaves.size();
    while (n > 1 && n % 2 == 0) {
      n /= 2;
      ++depth;
    }
    if (n != 1 || depth < 1) throw UsageError("leaf count must be a power of two, at least 2");
    if (spec.contains("depth") && spec["depth"].get<int>() != depth)
      throw UsageError("depth field disagrees with the leaf count");
    checked_depth(depth);
    return StepWeight(DyadicTree(depth), std::move(leaves));
  }

  const int depth = checked_depth(spec.value("depth", fallback_depth));
  const DyadicTree tree(depth);

  if (type == "power") {
    if (!spec.contains("alpha") || !spec["alpha"].is_number())
      throw UsageError("power spec needs a numeric \"alpha\"");
    return power_weight(spec["alpha"].get<double>(), tree);
  }

  if (type == "random") {
    if (!spec.contains("seed")) throw UsageError("random spec needs a \"seed\"");
    const std::uint64_t seed = spec["seed"].get<std::uint64_t>();
    const double epsilon = spec.value("epsilon", 0.5);
    return random_doubling_weight(seed, epsilon, tree);
  }

  if (type == "fkp") {
    IntervalSequence b(tree);
    double worst = 0.0;
    if (spec.contains("b")) {
      if (!spec["b"].is_object()) throw UsageError("fkp spec field \"b\" must be an object");
      for (const auto& [key, value] : spec["b"].items()) {
        if (!value.is_number()) throw UsageError("fkp coefficients must be numbers");
        const DyadicIndex I = parse_index_key(key);
        b.set(I, value.get<double>());
        worst = std::max(worst, std::abs(value.get<double>()) / std::sqrt(length(I)));
      }
    }
    const double slack = spec.contains("slack") ? spec["slack"].get<double>() : 1.0 - worst;
    return fkp_product(FkpCoefficients(std::move(b), slack), tree);
  }

  throw UsageError("unknown weight type: " + type);
}

/// Text form accepted on the command line: the literal alias "const1" or a
/// JSON constructor.
inline StepWeight weight_from_text(const std::string& text, int fallback_depth) {
  if (text == "const1") {
    const DyadicTree tree(checked_depth(fallback_depth));
    return StepWeight(tree, std::vector<double>(tree.leaf_count(), 1.0));
  }
  nlohmann::json spec;
  try {
    spec = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("weight spec is not valid JSON: ") + e.what());
  }
  return weight_from_spec(spec, fallback_depth);
}

/// Canonical printable form; re-parsing reproduces the weight bit for bit.
inline nlohmann::json weight_to_spec(const StepWeight& w) {
  nlohmann::json j;
  j["type"] = "leaves";
  j["depth"] = w.tree().depth();
  j["leaves"] = std::vector<double>(w.leaf_values().begin(), w.leaf_values().end());
  return j;
}

/// Sign patterns: aliases "all+" / "all-", or JSON
/// {"default": 1, "overrides": {"j,k": -1}}.
inline SignPattern sign_pattern_from_text(const std::string& text, const DyadicTree& tree) {
  if (text == "all+") return SignPattern(tree, +1);
  if (text == "all-") return SignPattern(tree, -1);
  nlohmann::json spec;
  try {
    spec = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("sign pattern is not valid JSON: ") + e.what());
  }
  if (!spec.is_object()) throw UsageError("sign pattern must be a JSON object");
  const int def = spec.value("default", 1);
  if (def != 1 && def != -1) throw UsageError("sign pattern default must be +1 or -1");
  SignPattern sigma(tree, def);
  if (spec.contains("overrides")) {
    if (!spec["overrides"].is_object()) throw UsageError("sign overrides must be an object");
    for (const auto& [key, value] : spec["overrides"].items()) {
      const int s = value.get<int>();
      if (s != 1 && s != -1) throw UsageError("sign overrides must be +1 or -1");
      sigma.set(parse_index_key(key), s);
    }
  }
  return sigma;
}

inline nlohmann::json sign_pattern_to_spec(const SignPattern& sigma) {
  nlohmann::json overrides = nlohmann::json::object();
  sigma.tree().for_each_nonleaf([&](DyadicIndex I) {
    if (sigma.at(I) < 0) overrides[index_key(I)] = -1;
  });
  nlohmann::json j;
  j["default"] = 1;
  j["overrides"] = std::move(overrides);
  return j;
}

inline nlohmann::json to_json(const CharacteristicReport& rep) {
  nlohmann::json j;
  j["depth"] = rep.depth;
  nlohmann::json ap = nlohmann::json::object();
  for (const auto& [p, value] : rep.ap) ap[detail::format_number(p)] = value;
  j["ap"] = std::move(ap);
  nlohmann::json rhp = nlohmann::json::object();
  for (const auto& [p, value] : rep.rhp) rhp[detail::format_number(p)] = value;
  j["rhp"] = std::move(rhp);
  j["aInf"] = rep.a_inf;
  j["rh1"] = rep.rh1;
  j["doubling"] = rep.doubling;
  const auto put = [&](const char* name, const std::optional<double>& x) {
    if (x) j[name] = *x;
  };
  put("jointA2w", rep.joint_a2w);
  put("restrictedA2w", rep.restricted_a2w);
  put("sfJoint", rep.sf_joint);
  put("sfCarleson", rep.sf_carleson);
  put("multJoint", rep.mult_joint);
  put("multCarleson", rep.mult_carleson);
  put("multDualCarleson", rep.mult_dual_carleson);
  put("qMax", rep.q_max);
  put("rMax", rep.r_max);
  return j;
}

/// One verdict annotated with the corpus coordinates it came from.
struct VerdictRow {
  Verdict verdict;
  std::uint64_t seed = 0;
  int depth = 0;
};

inline nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j;
  j["claimId"] = v.claim_id;
  j["lhs"] = v.lhs;
  j["rhs"] = v.rhs;
  j["slack"] = v.slack;
  j["pass"] = v.pass;
  j["asserted"] = v.asserted;
  j["context"] = v.context;
  return j;
}

inline nlohmann::json to_json(const VerdictRow& row) {
  nlohmann::json j = to_json(row.verdict);
  j["seed"] = row.seed;
  j["depth"] = row.depth;
  return j;
}

inline void write_verdicts_csv(std::ostream& out, const std::vector<VerdictRow>& rows) {
  out << "claimId,seed,depth,lhs,rhs,slack,pass\n";
  char buf[128];
  for (const VerdictRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", row.verdict.lhs, row.verdict.rhs,
                  row.verdict.slack);
    out << row.verdict.claim_id << ',' << row.seed << ',' << row.depth << ',' << buf << ','
        << (row.verdict.pass ? 1 : 0) << '\n';
  }
}

/// Fixed-width histogram of asserted slacks, for plotting.
inline void write_slack_histogram_csv(std::ostream& out, const std::vector<VerdictRow>& rows,
                                      int bins = 20) {
  out << "binLow,binHigh,count\n";
  std::vector<double> slacks;
  for (const VerdictRow& row : rows)
    if (row.verdict.asserted) slacks.push_back(row.verdict.slack);
  if (slacks.empty()) return;
  double lo = slacks.front(), hi = slacks.front();
  for (double s : slacks) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (hi == lo) hi = lo + 1.0;
  std::vector<long> count(static_cast<std::size_t>(bins), 0);
  for (double s : slacks) {
    auto b = static_cast<std::size_t>((s - lo) / (hi - lo) * bins);
    if (b >= count.size()) b = count.size() - 1;
    ++count[b];
  }
  char buf[80];
  for (int b = 0; b < bins; ++b) {
    const double width = (hi - lo) / bins;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", lo + b * width, lo + (b + 1) * width);
    out << buf << count[static_cast<std::size_t>(b)] << '\n';
  }
}

/// Per-entry series pairing the measured norm with weight characteristics,
/// for ratio plots.
struct SeriesRow {
  std::string label;
  std::uint64_t seed = 0;
  int depth = 0;
  double norm = 0.0;
  double upper_bound = 0.0;
  double a2_base = 0.0;
  double rh2_base = 0.0;
  double doubling_base = 0.0;
};

inline void write_series_csv(std::ostream& out, const std::vector<SeriesRow>& rows) {
  out << "label,seed,depth,norm,upperBound,a2,rh2,doubling\n";
  char buf[200];
  for (const SeriesRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g", r.norm, r.upper_bound,
                  r.a2_base, r.rh2_base, r.doubling_base);
    out << r.label << ',' << r.seed << ',' << r.depth << ',' << buf << '\n';
  }
}

/// Every claim the suite can produce, in stable report order.
inline const std::vector<std::string>& registered_claims() {
  static const std::vector<std::string> ids = {
      "squarefn-upper",
      "squarefn-lower-restricted",
      "squarefn-lower-carleson",
      "squarefn-testing",
      "squarefn-lower-joint-doubling",
      "testing-average-identity",
      "sawyer-quadruple",
      "weighted-carleson-embedding",
      "rh1-entropy-bound",
      "beznosova-dominated",
      "beznosova-transform",
      "haar-orthonormality",
      "haar-bessel",
      "fkp-roundtrip",
      "quadform-identity",
      "threeweight-forms",
      "resummation-identity",
      "flat-base-qr-zero",
      "multiplier-bound-ratio",
      "squarefn-indicator-testing",
      "squarefn-a2-ratio",
      "squarefn-a2-log-ratio",
      "rh2-linear-ratio",
      "rh2-cubic-ratio",
  };
  return ids;
}

/// Suite configuration. An absent suite list selects every registered claim;
/// an explicitly empty list selects none. When all of u, v, w specs are
/// given the suite runs once on that triple instead of the seeded corpus.
struct ExperimentConfig {
  int depth = 5;
  double epsilon = 0.5;
  std::uint64_t seed_first = 1;
  std::uint64_t seed_last = 100;
  std::size_t sigma_patterns = 2048;
  std::optional<std::vector<std::string>> suite;
  std::filesystem::path output_dir;
  std::map<std::string, double> tolerance_override;
  std::optional<std::array<nlohmann::json, 3>> triple;
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  ExperimentConfig cfg;
  cfg.depth = checked_depth(j.value("depth", 5));
  cfg.epsilon = j.value("epsilon", 0.5);
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
    throw UsageError("config epsilon must lie in (0, 1)");
  if (j.contains("seeds")) {
    const auto& s = j["seeds"];
    if (s.is_number_unsigned()) {
      cfg.seed_first = 1;
      cfg.seed_last = s.get<std::uint64_t>();
    } else if (s.is_object()) {
      cfg.seed_first = s.value("first", std::uint64_t{1});
      cfg.seed_last = s.value("last", cfg.seed_first);
    } else {
      throw UsageError("config seeds must be a count or {first, last}");
    }
    if (cfg.seed_last < cfg.seed_first) throw UsageError("config seeds range is empty");
  }
  cfg.sigma_patterns = j.value("patterns", std::size_t{2048});
  if (j.contains("suite")) {
    std::vector<std::string> ids;
    for (const auto& x : j["suite"]) {
      const std::string id = x.get<std::string>();
      const auto& known = registered_claims();
      if (std::find(known.begin(), known.end(), id) == known.end())
        throw UsageError("unknown claim id in suite: " + id);
      ids.push_back(id);
    }
    cfg.suite = std::move(ids);
  }
  if (!j.contains("outputDir") || !j["outputDir"].is_string())
    throw UsageError("config needs an \"outputDir\" string");
  cfg.output_dir = j["outputDir"].get<std::string>();
  if (j.contains("tolerancesOverride")) {
    for (const auto& [key, value] : j["tolerancesOverride"].items())
      cfg.tolerance_override[key] = value.get<double>();
  }
  if (j.contains("weightSpecs")) {
    const auto& ws = j["weightSpecs"];
    if (!ws.is_object() || !ws.contains("u") || !ws.contains("v") || !ws.contains("w"))
      throw UsageError("weightSpecs needs all of u, v, w");
    cfg.triple = {ws["u"], ws["v"], ws["w"]};
  }
  return cfg;
}

struct SuiteResult {
  std::vector<VerdictRow> rows;
  std::vector<SeriesRow> series;
  bool all_asserted_pass = true;
};

/// Runs the selected claims over the configured inputs. Tolerance overrides
/// re-evaluate pass for asserted claims only.
inline SuiteResult run_claim_suite(const ExperimentConfig& cfg) {
  const auto selected = [&](const std::string& id) {
    if (!cfg.suite) return true;
    return std::find(cfg.suite->begin(), cfg.suite->end(), id) != cfg.suite->end();
  };
  const bool any_selected = !cfg.suite || !cfg.suite->empty();

  std::vector<CorpusEntry> entries;
  if (any_selected) {
    if (cfg.triple) {
      entries.push_back({"config", 0, weight_from_spec((*cfg.triple)[0], cfg.depth),
                         weight_from_spec((*cfg.triple)[1], cfg.depth),
                         weight_from_spec((*cfg.triple)[2], cfg.depth)});
    } else {
      const DyadicTree tree(cfg.depth);
      for (std::uint64_t seed = cfg.seed_first; seed <= cfg.seed_last; ++seed)
        entries.push_back({"random" + std::to_string(seed), seed,
                           random_doubling_weight(3 * seed, cfg.epsilon, tree),
                           random_doubling_weight(3 * seed + 1, cfg.epsilon, tree),
                           random_doubling_weight(3 * seed + 2, cfg.epsilon, tree)});
    }
  }

  SuiteResult result;
  const auto add = [&](const Verdict& v, const CorpusEntry& e) {
    if (!selected(v.claim_id)) return;
    Verdict out = v;
    if (out.asserted) {
      const auto it = cfg.tolerance_override.find(out.claim_id);
      if (it != cfg.tolerance_override.end())
        out.pass = out.lhs <= out.rhs + it->second * std::max(1.0, std::abs(out.rhs));
      result.all_asserted_pass = result.all_asserted_pass && out.pass;
    }
    result.rows.push_back({std::move(out), e.seed, e.w.tree().depth()});
  };

  static const std::vector<std::string> necessity_ids = {
      "squarefn-lower-restricted", "squarefn-lower-carleson", "squarefn-testing",
      "squarefn-lower-joint-doubling", "testing-average-identity"};
  static const std::vector<std::string> lemma_ids = {
      "weighted-carleson-embedding", "rh1-entropy-bound", "beznosova-dominated",
      "beznosova-transform"};
  static const std::vector<std::string> multiplier_ids = {
      "threeweight-forms", "resummation-identity", "flat-base-qr-zero", "multiplier-bound-ratio"};
  static const std::vector<std::string> corollary_ids = {
      "squarefn-indicator-testing", "squarefn-a2-ratio", "squarefn-a2-log-ratio",
      "rh2-linear-ratio", "rh2-cubic-ratio"};
  const auto wants = [&](const std::vector<std::string>& ids) {
    for (const auto& id : ids)
      if (selected(id)) return true;
    return false;
  };

  for (const CorpusEntry& e : entries) {
    const auto& tree = e.w.tree();
    if (selected("squarefn-upper")) {
      const Verdict vd = verify_sufficiency(e.u, e.v, e.w, e.label);
      add(vd, e);
      result.series.push_back({e.label, e.seed, tree.depth(), vd.lhs, vd.rhs,
                               ap_characteristic(e.w, 2.0), rhp_characteristic(e.w, 2.0),
                               doubling_constant(e.w)});
    }
    if (wants(necessity_ids))
      for (const Verdict& vd : verify_necessity(e.u, e.v, e.w, e.label)) add(vd, e);
    if (selected("sawyer-quadruple")) {
      CarlesonSequence lambda(tree);
      tree.for_each_nonleaf([&](DyadicIndex I) { lambda.set(I, length(I)); });
      std::vector<double> leaves(tree.leaf_count());
      for (std::size_t k = 0; k < leaves.size(); ++k)
        leaves[k] =
            2.0 * dyadic::detail::keyed_unit(e.seed ^ 0x5eedf00dull, tree.depth(),
                                             static_cast<std::uint32_t>(k)) -
            1.0;
      const std::vector<StepFunction> fs = {power(e.w, 0.5).as_function(),
                                            StepFunction(tree, std::move(leaves))};
      add(verify_sawyer(e.u, e.w, lambda, fs, e.label), e);
    }
    if (wants(lemma_ids))
      for (const Verdict& vd : verify_bounded_constant_lemmas(e.u, e.w, e.label)) add(vd, e);
    if (selected("haar-orthonormality") || selected("haar-bessel"))
      for (const Verdict& vd : verify_haar_system(e.w, e.label)) add(vd, e);
    if (selected("fkp-roundtrip")) add(verify_fkp_roundtrip(e.w, e.label), e);
    if (selected("quadform-identity")) add(verify_quadratic_form(e.v, e.w, e.label), e);
    if (wants(multiplier_ids)) {
      SamplingBudget budget;
      budget.patterns = cfg.sigma_patterns;
      const MultiplierReport rep = verify_haar_multiplier_equivalence(e.u, e.v, e.w, budget, e.label);
      for (const Verdict& vd : rep.verdicts) add(vd, e);
    }
    if (wants(corollary_ids))
      for (const Verdict& vd : verify_corollaries(e.w, e.u, e.label)) add(vd, e);
  }
  return result;
}

/// Writes verdicts.csv, verdicts.json, slack_histogram.csv, and series.csv.
/// The output directory is created if missing, but its parent must exist.
inline void write_suite_outputs(const SuiteResult& result, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir = cfg.output_dir;
  if (dir.empty()) throw UsageError("output directory not set");
  if (!fs::exists(dir)) {
    const fs::path parent = dir.parent_path().empty() ? fs::path(".") : dir.parent_path();
    if (!fs::exists(parent))
      throw UsageError("parent of output directory does not exist: " + parent.string());
    fs::create_directory(dir);
  }
  {
    std::ofstream out(dir / "verdicts.csv");
    write_verdicts_csv(out, result.rows);
  }
  {
    nlohmann::json rows = nlohmann::json::array();
    for (const VerdictRow& row : result.rows) rows.push_back(to_json(row));
    std::ofstream out(dir / "verdicts.json");
    out << rows.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "slack_histogram.csv");
    write_slack_histogram_csv(out, result.rows);
  }
  {
    std::ofstream out(dir / "series.csv");
    write_series_csv(out, result.series);
  }
}

}  // namespace dyadic
