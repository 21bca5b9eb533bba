// Command line front end: weight characteristics, operator norms, claim
// verification suites, weight generation, and parameter sweeps over dyadic
// step weights on [0,1).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyadic/io.hpp"

namespace {

using dyadic::UsageError;

void print_json(const nlohmann::json& j) { std::printf("%s\n", j.dump(2).c_str()); }

nlohmann::json norm_json(const char* op, const dyadic::NormResult& r) {
  nlohmann::json j;
  j["op"] = op;
  j["value"] = r.value;
  j["method"] = dyadic::to_string(r.method);
  j["iterations"] = r.iterations;
  j["depth"] = r.depth;
  return j;
}

struct CharacteristicsArgs {
  std::string w;
  std::string u, v;
  std::vector<double> ps{2.0};
  int depth = 8;
};

int run_characteristics(const CharacteristicsArgs& a) {
  const dyadic::StepWeight w = dyadic::weight_from_text(a.w, a.depth);
  if (a.u.empty() != a.v.empty())
    throw UsageError("supply both --u and --v for the three-weight report, or neither");
  dyadic::CharacteristicReport rep;
  if (!a.u.empty()) {
    const dyadic::StepWeight u = dyadic::weight_from_text(a.u, w.tree().depth());
    const dyadic::StepWeight v = dyadic::weight_from_text(a.v, w.tree().depth());
    rep = dyadic::theorem_constants(u, v, w, a.ps);
  } else {
    rep = dyadic::single_weight_report(w, a.ps);
  }
  print_json(dyadic::to_json(rep));
  return 0;
}

struct NormArgs {
  std::string op;
  std::string u = "const1", v = "const1", w = "const1";
  int depth = 8;
  double t = 1.0;
  std::string sigma = "all+";
  bool sigma_sup = false;
  std::size_t patterns = 2048;
  std::uint64_t sample_seed = 1;
};

int run_norm(const NormArgs& a) {
  const dyadic::StepWeight w = dyadic::weight_from_text(a.w, a.depth);
  const int depth = w.tree().depth();
  const dyadic::StepWeight u = dyadic::weight_from_text(a.u, depth);
  const dyadic::StepWeight v = dyadic::weight_from_text(a.v, depth);

  if (a.op == "squarefn") {
    print_json(norm_json("squarefn", dyadic::square_function_norm_detailed(u, v, w)));
    return 0;
  }
  if (a.op == "haarmult") {
    if (a.sigma_sup) {
      dyadic::SamplingBudget budget{a.patterns, a.sample_seed};
      const dyadic::SigmaNormResult r = dyadic::uniform_sigma_norm(w, a.t, u, v, budget);
      nlohmann::json j = norm_json("haarmult", r.norm);
      j["sigmaSup"] = true;
      j["argmaxSigma"] = dyadic::sign_pattern_to_spec(r.argmax);
      print_json(j);
      return 0;
    }
    const dyadic::SignPattern sigma = dyadic::sign_pattern_from_text(a.sigma, w.tree());
    const dyadic::HaarMultiplierSpec spec(w, a.t, sigma);
    const auto r = dyadic::linear_operator_norm_detailed(
        [&](const dyadic::StepFunction& f) { return dyadic::apply_haar_multiplier(spec, f); }, u,
        v);
    print_json(norm_json("haarmult", r));
    return 0;
  }
  if (a.op == "positive") {
    const dyadic::CarlesonSequence lambda = dyadic::lambda_from_weights(u, v, w);
    const auto r = dyadic::linear_operator_norm_detailed(
        [&](const dyadic::StepFunction& f) { return dyadic::apply_positive_operator(w, lambda, f); },
        u, v);
    print_json(norm_json("positive", r));
    return 0;
  }
  throw UsageError("unknown operator: " + a.op);
}

struct VerifyArgs {
  std::string config_path;
  std::string out_dir;
  int depth = 5;
  double epsilon = 0.5;
  std::uint64_t seed_first = 1, seed_last = 100;
  std::vector<std::string> suite;
  bool suite_given = false;
  std::size_t patterns = 2048;
};

int run_verify(const VerifyArgs& a) {
  nlohmann::json cj;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) throw UsageError("cannot open config file: " + a.config_path);
    try {
      in >> cj;
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
  } else {
    if (a.out_dir.empty()) throw UsageError("verify needs --config or --out");
    cj["depth"] = a.depth;
    cj["epsilon"] = a.epsilon;
    cj["seeds"] = {{"first", a.seed_first}, {"last", a.seed_last}};
    cj["outputDir"] = a.out_dir;
    cj["patterns"] = a.patterns;
    if (a.suite_given) cj["suite"] = a.suite;
  }
  const dyadic::ExperimentConfig cfg = dyadic::config_from_json(cj);
  const dyadic::SuiteResult result = dyadic::run_claim_suite(cfg);
  dyadic::write_suite_outputs(result, cfg);

  std::size_t asserted = 0, failures = 0, monitored = 0;
  for (const auto& row : result.rows) {
    if (row.verdict.asserted) {
      ++asserted;
      if (!row.verdict.pass) ++failures;
    } else {
      ++monitored;
    }
  }
  nlohmann::json summary;
  summary["rows"] = result.rows.size();
  summary["asserted"] = asserted;
  summary["assertedFailures"] = failures;
  summary["monitored"] = monitored;
  summary["allAssertedPass"] = result.all_asserted_pass;
  summary["outputDir"] = cfg.output_dir.string();
  print_json(summary);
  return result.all_asserted_pass ? 0 : 1;
}

struct GenerateArgs {
  std::string type;
  int depth = 8;
  std::optional<double> alpha;
  std::uint64_t seed = 1;
  double epsilon = 0.5;
  std::optional<double> slack;
  std::string b_json;
  std::string leaves_json;
  bool constructor_form = false;
};

int run_generate(const GenerateArgs& a) {
  nlohmann::json spec;
  if (a.type == "const1") {
    spec["type"] = "leaves";
    spec["leaves"] = std::vector<double>(std::size_t{1} << dyadic::checked_depth(a.depth), 1.0);
  } else if (a.type == "leaves") {
    if (a.leaves_json.empty()) throw UsageError("--type leaves needs --leaves");
    spec["type"] = "leaves";
    try {
      spec["leaves"] = nlohmann::json::parse(a.leaves_json);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("--leaves is not valid JSON: ") + e.what());
    }
  } else if (a.type == "power") {
    if (!a.alpha) throw UsageError("--type power needs --alpha");
    spec = {{"type", "power"}, {"depth", a.depth}, {"alpha", *a.alpha}};
  } else if (a.type == "random") {
    spec = {{"type", "random"}, {"depth", a.depth}, {"seed", a.seed}, {"epsilon", a.epsilon}};
  } else if (a.type == "fkp") {
    spec = {{"type", "fkp"}, {"depth", a.depth}};
    if (!a.b_json.empty()) {
      try {
        spec["b"] = nlohmann::json::parse(a.b_json);
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("--b is not valid JSON: ") + e.what());
      }
    }
    if (a.slack) spec["slack"] = *a.slack;
  } else {
    throw UsageError("unknown weight type: " + a.type);
  }
  const dyadic::StepWeight w = dyadic::weight_from_spec(spec, a.depth);
  print_json(a.constructor_form ? spec : dyadic::weight_to_spec(w));
  return 0;
}

struct SweepArgs {
  std::string param;
  double from = 0.0, to = 0.0;
  int steps = 9;
  int depth = 5;
  std::uint64_t seed = 1;
  double epsilon = 0.5;
  std::string u = "const1", v = "const1";
  std::string out;
};

int run_sweep(const SweepArgs& a) {
  if (a.steps < 1) throw UsageError("--steps must be at least 1");
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw UsageError("cannot open output file: " + a.out);
  }
  std::ostream& out = a.out.empty() ? std::cout : file;

  out << "param,value,norm,a2,rh2,doubling\n";
  for (int i = 0; i < a.steps; ++i) {
    const double value =
        a.steps == 1 ? a.from : a.from + (a.to - a.from) * i / static_cast<double>(a.steps - 1);
    int depth = a.depth;
    std::optional<dyadic::StepWeight> w;
    if (a.param == "alpha") {
      w = dyadic::power_weight(value, dyadic::DyadicTree(dyadic::checked_depth(depth)));
    } else if (a.param == "seed") {
      const auto seed = static_cast<std::uint64_t>(std::llround(value));
      w = dyadic::random_doubling_weight(seed, a.epsilon,
                                         dyadic::DyadicTree(dyadic::checked_depth(depth)));
    } else if (a.param == "epsilon") {
      w = dyadic::random_doubling_weight(a.seed, value,
                                         dyadic::DyadicTree(dyadic::checked_depth(depth)));
    } else if (a.param == "depth") {
      depth = dyadic::checked_depth(static_cast<int>(std::llround(value)));
      w = dyadic::random_doubling_weight(a.seed, a.epsilon, dyadic::DyadicTree(depth));
    } else {
      throw UsageError("unknown sweep parameter: " + a.param);
    }
    const dyadic::StepWeight u = dyadic::weight_from_text(a.u, depth);
    const dyadic::StepWeight v = dyadic::weight_from_text(a.v, depth);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g", value,
                  dyadic::square_function_norm(u, v, *w), dyadic::ap_characteristic(*w, 2.0),
                  dyadic::rhp_characteristic(*w, 2.0), dyadic::doubling_constant(*w));
    out << a.param << ',' << buf << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted dyadic square function and Haar multiplier toolkit"};
  app.require_subcommand(1);

  CharacteristicsArgs ca;
  CLI::App* characteristics =
      app.add_subcommand("characteristics", "Weight characteristics as JSON");
  characteristics->add_option("--w", ca.w, "weight spec or const1")->required();
  characteristics->add_option("--u", ca.u, "left weight spec (with --v: full report)");
  characteristics->add_option("--v", ca.v, "right weight spec");
  characteristics->add_option("--p", ca.ps, "exponents for Ap / RHp");
  characteristics->add_option("--depth", ca.depth, "default tree depth");

  NormArgs na;
  CLI::App* norm = app.add_subcommand("norm", "Operator norm between weighted spaces");
  norm->add_option("--op", na.op, "squarefn | haarmult | positive")->required();
  norm->add_option("--u", na.u, "source weight spec");
  norm->add_option("--v", na.v, "target weight spec");
  norm->add_option("--w", na.w, "structural weight spec");
  norm->add_option("--depth", na.depth, "default tree depth");
  norm->add_option("--t", na.t, "multiplier exponent");
  norm->add_option("--sigma", na.sigma, "sign pattern: all+ | all- | JSON");
  norm->add_flag("--sigma-sup", na.sigma_sup, "supremum over sign patterns");
  norm->add_option("--patterns", na.patterns, "sampling budget for large trees");
  norm->add_option("--sample-seed", na.sample_seed, "sampling seed");

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand("verify", "Run claim suites, write verdicts");
  verify->add_option("--config", va.config_path, "JSON config file");
  verify->add_option("--out", va.out_dir, "output directory");
  verify->add_option("--depth", va.depth, "tree depth");
  verify->add_option("--epsilon", va.epsilon, "doubling margin for random weights");
  verify->add_option("--seed-first", va.seed_first, "first corpus seed");
  verify->add_option("--seed-last", va.seed_last, "last corpus seed");
  verify->add_option("--suite", va.suite, "claim ids to run (default: all)");
  verify->add_option("--patterns", va.patterns, "sign pattern budget");

  GenerateArgs ga;
  CLI::App* generate = app.add_subcommand("generate", "Materialize a weight spec");
  generate->add_option("--type", ga.type, "const1 | leaves | power | random | fkp")->required();
  generate->add_option("--depth", ga.depth, "tree depth");
  generate->add_option("--alpha", ga.alpha, "power exponent");
  generate->add_option("--seed", ga.seed, "random seed");
  generate->add_option("--epsilon", ga.epsilon, "doubling margin");
  generate->add_option("--slack", ga.slack, "coefficient slack");
  generate->add_option("--b", ga.b_json, "coefficient map JSON for fkp");
  generate->add_option("--leaves", ga.leaves_json, "leaf array JSON");
  generate->add_flag("--constructor", ga.constructor_form, "echo constructor instead of leaves");

  SweepArgs sa;
  CLI::App* sweep = app.add_subcommand("sweep", "Characteristic and norm series as CSV");
  sweep->add_option("--param", sa.param, "alpha | seed | epsilon | depth")->required();
  sweep->add_option("--from", sa.from, "first value")->required();
  sweep->add_option("--to", sa.to, "last value")->required();
  sweep->add_option("--steps", sa.steps, "number of samples");
  sweep->add_option("--depth", sa.depth, "tree depth for non-depth sweeps");
  sweep->add_option("--seed", sa.seed, "base seed");
  sweep->add_option("--epsilon", sa.epsilon, "base doubling margin");
  sweep->add_option("--u", sa.u, "source weight spec");
  sweep->add_option("--v", sa.v, "target weight spec");
  sweep->add_option("--out", sa.out, "output file (default stdout)");

  int code = 0;
  characteristics->callback([&] { code = run_characteristics(ca); });
  norm->callback([&] { code = run_norm(na); });
  verify->callback([&] {
    va.suite_given = verify->count("--suite") > 0;
    code = run_verify(va);
  });
  generate->callback([&] { code = run_generate(ga); });
  sweep->callback([&] { code = run_sweep(sa); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dyadic::BadExponent& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dyadic::EigenFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const dyadic::NonlinearOperator& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const dyadic::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return code;
}
