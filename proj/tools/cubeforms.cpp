// cubeforms command-line driver: exact densities, bias bounds, combinatorial
// constants, density-bound certificates, and the example-family generators,
// over systems of mod-p linear conditions on alphabet cubes S^n.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cubeforms/cubeforms.hpp"
#include "cubeforms/suite.hpp"

namespace {

using namespace cubeforms;

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidInput, "not an integer: " + item);
    }
  }
  return out;
}

std::uint64_t resolve_budget(std::optional<std::uint64_t> flag_value) {
  if (flag_value) return *flag_value;
  if (const char* env = std::getenv("CUBEFORMS_BUDGET")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidInput, "CUBEFORMS_BUDGET is not an integer");
    }
  }
  return kDefaultBudget;
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

int cmd_lse(int p_value, const std::string& s_text, const std::string& e_text) {
  const Modulus p(p_value);
  const Alphabet S(p, parse_int_list(s_text));
  const TargetSet E(p, parse_int_list(e_text));
  const LWitness lw = compute_L(S, E);
  std::cout << "L=" << lw.L << " witness=" << join_ints(lw.tuple)
            << " bound=" << lw.bound << "\n";
  return 0;
}

int cmd_density(const std::string& input, const std::string& mode,
                std::uint64_t samples, std::uint64_t seed,
                std::optional<std::uint64_t> budget_flag) {
  const auto system = system_from_json(parse_json_text(read_file(input)));
  if (mode == "exact") {
    const Rational density = satisfying_density(system, resolve_budget(budget_flag));
    std::cout << to_fraction_string(density) << " = " << to_double(density) << "\n";
  } else if (mode == "mc") {
    const auto est = mc_density(system, samples, seed);
    std::cout << est.estimate << " +/- " << est.hoeffding_99
              << " (99% Hoeffding), samples=" << est.samples << ", seed=" << est.seed
              << "\n";
  } else {
    fail(ErrorKind::InvalidInput, "mode must be exact or mc");
  }
  return 0;
}

int cmd_bound(const std::string& input, std::optional<int> u_flag,
              std::optional<int> r_flag, std::optional<double> epsilon,
              const std::string& output, std::optional<std::uint64_t> budget_flag) {
  const auto system = system_from_json(parse_json_text(read_file(input)));
  const int p_value = system.modulus().value();

  int u = 0, r = 0;
  if (epsilon) {
    if (*epsilon <= 0 || *epsilon >= 1)
      fail(ErrorKind::InvalidInput, "epsilon must lie in (0, 1)");
    const double log_term = std::log(2.0 / *epsilon);
    u = static_cast<int>(std::ceil(p_value * log_term));
    const double p4 = std::pow(static_cast<double>(p_value), 4);
    r = static_cast<int>(std::ceil(5.0 * p4 * log_term));
  } else if (u_flag && r_flag) {
    u = *u_flag;
    r = *r_flag;
  } else {
    fail(ErrorKind::InvalidInput, "provide either --epsilon or both -u and -r");
  }

  const auto report = certify_density_bound(system, u, r, resolve_budget(budget_flag));
  std::cout << "kind=" << to_string(report.kind) << " u=" << report.u
            << " r=" << report.r << "\n";
  std::cout << "bound=" << decimal_string(report.bound) << " ("
            << to_fraction_string(report.bound_exact) << ")\n";
  if (report.trivial) std::cout << "trivial=true (no usable sunflower petals)\n";
  if (report.best_effort) std::cout << "best_effort=true\n";
  if (!report.dropped.empty()) {
    std::cout << "dropped=";
    for (std::size_t i = 0; i < report.dropped.size(); ++i)
      std::cout << (i ? "," : "") << report.dropped[i];
    std::cout << "\n";
  }
  if (report.exact_density) {
    std::cout << "exact=" << to_fraction_string(*report.exact_density) << " = "
              << to_double(*report.exact_density) << "\n";
    std::cout << (*report.exact_density <= report.bound_exact ? "bound >= exact"
                                                              : "BOUND VIOLATED")
              << "\n";
  }
  if (!output.empty()) {
    write_file(output,
               dump_canonical(certificate_to_json(to_document(report, p_value))) + "\n");
    std::cout << "certificate written to " << output << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& system_path, const std::string& cert_path) {
  const auto system = system_from_json(parse_json_text(read_file(system_path)));
  const auto cert = certificate_from_json(parse_json_text(read_file(cert_path)));
  const auto result = verify_certificate_document(cert, system);
  if (result.ok) {
    std::cout << "certificate verifies\n";
    return 0;
  }
  for (const auto& reason : result.reasons) std::cout << "failed: " << reason << "\n";
  return 1;
}

int cmd_gen(const std::string& name, int p, int r, int k, int t, int u,
            const std::string& s_text, const std::string& e_text, std::uint64_t seed,
            const std::string& output_prefix) {
  std::optional<ConstructionReport> report;
  if (name == "example1") {
    report = gen_example1(p, k);
  } else if (name == "example2") {
    report = gen_example2(p, r);
  } else if (name == "example3") {
    report = gen_example3(p, r, k, u);
  } else if (name == "example4") {
    report = gen_example4(p, r, k, seed);
  } else if (name == "span") {
    report = gen_span_family(p, r, t);
  } else if (name == "tightness") {
    report = gen_tightness(p, parse_int_list(s_text), parse_int_list(e_text), k);
  } else {
    fail(ErrorKind::InvalidInput, "unknown construction: " + name);
  }

  std::cout << "construction " << report->name << " (k=" << report->system.k()
            << ")\n";
  for (const auto& claim : report->claims)
    std::cout << "  [" << (claim.checked ? "ok" : "UNCHECKED") << "] " << claim.name
              << ": " << claim.detail << "\n";

  if (!output_prefix.empty()) {
    write_file(output_prefix + ".system.json",
               dump_canonical(system_to_json(report->system)) + "\n");
    write_file(output_prefix + ".report.json",
               dump_pretty(construction_report_to_json(*report)));
    std::cout << "wrote " << output_prefix << ".system.json and " << output_prefix
              << ".report.json\n";
  }
  return report->all_checked() ? 0 : 1;
}

int cmd_suite(const std::string& fixtures_dir, bool as_json) {
  const auto results = suite::run_all(fixtures_dir);
  bool all_pass = true;
  if (as_json) {
    Json doc = Json::array();
    for (const auto& r : results) {
      doc.push_back({{"id", r.id},
                     {"name", r.name},
                     {"pass", r.pass},
                     {"seconds", r.seconds},
                     {"detail", r.detail}});
      all_pass = all_pass && r.pass;
    }
    std::cout << dump_pretty(doc);
  } else {
    for (const auto& r : results) {
      std::ostringstream id;
      if (r.id > 0)
        id << "[" << std::setw(2) << r.id << "]";
      else
        id << "[fx]";
      std::cout << id.str() << " " << (r.pass ? "PASS" : "FAIL") << "  " << r.name
                << "  (" << std::fixed << std::setprecision(2) << r.seconds << " s)"
                << (r.detail.empty() ? "" : "  — " + r.detail) << "\n";
      all_pass = all_pass && r.pass;
    }
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact analysis of mod-p linear conditions on alphabet cubes"};
  app.require_subcommand(1);

  // lse
  auto* lse = app.add_subcommand("lse", "compute L(S, E) with witness and bound");
  int lse_p = 3;
  std::string lse_s, lse_e;
  lse->add_option("-p", lse_p, "prime modulus")->required();
  lse->add_option("-S", lse_s, "alphabet, comma separated")->required();
  lse->add_option("-E", lse_e, "target set, comma separated")->required();

  // density
  auto* density = app.add_subcommand("density", "satisfying density of a system");
  std::string density_input, density_mode = "exact";
  std::uint64_t density_samples = 100'000, density_seed = 1;
  std::optional<std::uint64_t> density_budget;
  density->add_option("input", density_input, "system document (JSON)")->required();
  density->add_option("--mode", density_mode, "exact or mc");
  density->add_option("--samples", density_samples, "Monte Carlo sample count");
  density->add_option("--seed", density_seed, "Monte Carlo seed");
  density->add_option("--budget", density_budget, "DP state-update budget");

  // bound
  auto* bound = app.add_subcommand("bound", "produce a density-bound certificate");
  std::string bound_input, bound_output;
  std::optional<int> bound_u, bound_r;
  std::optional<double> bound_epsilon;
  std::optional<std::uint64_t> bound_budget;
  bound->add_option("input", bound_input, "system document (JSON)")->required();
  bound->add_option("-u", bound_u, "separated subfamily target size");
  bound->add_option("-r", bound_r, "separation level");
  bound->add_option("--epsilon", bound_epsilon,
                    "derive u = ceil(p ln(2/eps)), r = ceil(5 p^4 ln(2/eps))");
  bound->add_option("-o,--output", bound_output, "write certificate JSON here");
  bound->add_option("--budget", bound_budget, "DP state-update budget");

  // verify
  auto* verify = app.add_subcommand("verify", "re-validate a certificate");
  std::string verify_system, verify_cert;
  verify->add_option("system", verify_system, "system document")->required();
  verify->add_option("certificate", verify_cert, "certificate document")->required();

  // gen
  auto* gen = app.add_subcommand("gen", "generate an example construction");
  std::string gen_name, gen_s = "0,1", gen_e, gen_output;
  int gen_p = 3, gen_r = 1, gen_k = 2, gen_t = 1, gen_u = 0;
  std::uint64_t gen_seed = 1;
  gen->add_option("name", gen_name,
                  "example1|example2|example3|example4|span|tightness")
      ->required();
  gen->add_option("-p", gen_p, "prime modulus");
  gen->add_option("-r", gen_r, "separation / block parameter");
  gen->add_option("-k", gen_k, "number of conditions");
  gen->add_option("-t", gen_t, "span generator count");
  gen->add_option("-u", gen_u, "conditioned value (example3)");
  gen->add_option("-S", gen_s, "alphabet (tightness)");
  gen->add_option("-E", gen_e, "target set (tightness)");
  gen->add_option("--seed", gen_seed, "generator seed (example4)");
  gen->add_option("-o,--output", gen_output, "output path prefix");

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "run the full acceptance battery");
  std::string suite_fixtures = "fixtures";
  bool suite_json = false;
  suite_cmd->add_option("fixtures", suite_fixtures, "fixtures directory");
  suite_cmd->add_flag("--json", suite_json, "machine-readable results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (lse->parsed()) return cmd_lse(lse_p, lse_s, lse_e);
    if (density->parsed())
      return cmd_density(density_input, density_mode, density_samples, density_seed,
                         density_budget);
    if (bound->parsed())
      return cmd_bound(bound_input, bound_u, bound_r, bound_epsilon, bound_output,
                       bound_budget);
    if (verify->parsed()) return cmd_verify(verify_system, verify_cert);
    if (gen->parsed())
      return cmd_gen(gen_name, gen_p, gen_r, gen_k, gen_t, gen_u, gen_s, gen_e,
                     gen_seed, gen_output);
    if (suite_cmd->parsed()) return cmd_suite(suite_fixtures, suite_json);
  } catch (const Error& e) {
    std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
    if (e.kind() == ErrorKind::ExactEngineTooLarge)
      std::cerr << "hint: retry with --mode mc or raise --budget\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
