// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Optional arguments: --only 1,2,3  --jobs N  --seed S  --json FILE

#include "softdd/acceptance.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

int main(int argc, char** argv) {
  softdd::AcceptanceOptions opts;
  std::string json_path;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    const std::string value = argv[i + 1];
    if (key == "--only") {
      std::stringstream ss(value);
      for (std::string item; std::getline(ss, item, ',');) opts.only.push_back(std::stoi(item));
    } else if (key == "--jobs") {
      opts.jobs = std::stoi(value);
    } else if (key == "--seed") {
      opts.seed = std::stoull(value);
    } else if (key == "--json") {
      json_path = value;
    } else {
      std::cerr << "unknown option " << key << '\n';
      return 2;
    }
  }
  opts.on_result = [](const softdd::CriterionResult& r) {
    std::cout << softdd::format_result(r) << std::endl;
  };
  const auto results = softdd::run_acceptance(opts);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << '/' << results.size() << " criteria passed\n";
  if (!json_path.empty()) std::ofstream(json_path) << softdd::results_json(results) << '\n';
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
