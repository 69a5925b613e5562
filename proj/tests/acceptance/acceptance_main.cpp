// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "chb/acceptance.hpp"

#include "CLI11.hpp"
#include <fmt/format.h>

#include <cstdio>

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  chb::AcceptanceOptions o;
  o.preset_dir = CHB_PRESET_DIR;
  app.add_option("--presets", o.preset_dir);
  app.add_option("--threads", o.threads);
  app.add_option("--only", o.only);
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  const auto results = chb::run_acceptance(o, [&](const chb::CriterionResult& r) {
    fmt::print("{}\n", chb::format_result(r));
    std::fflush(stdout);
    if (!r.pass) ++failed;
  });
  fmt::print("{} of {} criteria passed\n", results.size() - static_cast<std::size_t>(failed), results.size());
  return failed == 0 ? 0 : 1;
}
