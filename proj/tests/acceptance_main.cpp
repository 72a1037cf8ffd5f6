// Acceptance battery driver: runs each top-level criterion at its stated
// tolerance and prints one pass/fail line per criterion. Exit code is the
// number of failed lines.

#include <cstring>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "cubeforms/suite.hpp"

namespace {

void print_line(const cubeforms::suite::CriterionResult& r) {
  std::cout << "[" << (r.pass ? "PASS" : "FAIL") << "] ";
  if (r.id > 0) std::cout << "criterion " << r.id << ": ";
  std::cout << r.name << " (" << std::fixed << std::setprecision(2)
            << r.seconds << " s / budget " << std::setprecision(0) << r.time_budget
            << " s)";
  if (!r.detail.empty()) std::cout << " -- " << r.detail;
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  bool fixtures_only = false;
  std::string fixtures_dir;

  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--fixtures") == 0 && i + 1 < argc) {
      fixtures_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--fixtures-only") == 0) {
      fixtures_only = true;
    } else {
      std::cerr << "usage: acceptance [--only N] [--fixtures DIR] [--fixtures-only]\n";
      return 2;
    }
  }

  std::vector<cubeforms::suite::CriterionResult> results;
  try {
    if (fixtures_only) {
      results = cubeforms::suite::run_fixture_checks(
          fixtures_dir.empty() ? "fixtures" : fixtures_dir);
    } else if (only > 0) {
      results.push_back(cubeforms::suite::run_criterion(only));
    } else {
      results = cubeforms::suite::run_all(fixtures_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "acceptance run aborted: " << e.what() << "\n";
    return 99;
  }

  int failures = 0;
  for (const auto& r : results) {
    print_line(r);
    if (!r.pass) ++failures;
  }
  return failures;
}
