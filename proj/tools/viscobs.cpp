#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "viscobs/runner.hpp"
#include "viscobs/scenario.hpp"

namespace {

viscobs::Scenario resolve(const std::string& ref) {
  for (const auto& name : viscobs::builtin_scenario_names())
    if (ref == name) return viscobs::named_scenario(name);
  return viscobs::load_scenario_file(ref);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"observability-cost toolkit for gradient flows in the vanishing "
               "viscosity limit"};
  app.require_subcommand(1);

  std::string scenario_ref, out_dir = "out";
  int threads = 0;
  std::uint64_t seed = 0;
  bool have_seed = false;

  auto* run = app.add_subcommand("run", "run a scenario file or builtin scenario");
  run->add_option("scenario", scenario_ref, "scenario file path or builtin name")
      ->required();
  run->add_option("--out", out_dir, "output directory for report.json and CSVs");
  run->add_option("--threads", threads, "worker threads (0 = library default)");
  run->add_option("--seed", seed, "override the scenario seed")
      ->each([&](const std::string&) { have_seed = true; });

  std::string check_ref;
  auto* check = app.add_subcommand("check", "parse and validate a scenario file");
  check->add_option("scenario", check_ref, "scenario file path")->required();

  auto* list = app.add_subcommand("list-builtins", "list built-in scenarios");

  std::string show_ref;
  auto* show = app.add_subcommand("show", "print a builtin as a scenario file");
  show->add_option("name", show_ref, "builtin name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& name : viscobs::builtin_scenario_names())
        std::cout << name << "\n";
      return 0;
    }
    if (show->parsed()) {
      std::cout << viscobs::scenario_to_text(viscobs::named_scenario(show_ref));
      return 0;
    }
    if (check->parsed()) {
      auto sc = viscobs::load_scenario_file(check_ref);
      std::cout << "ok: " << sc.name << "\n";
      return 0;
    }
    // run
    auto sc = resolve(scenario_ref);
    if (have_seed) sc.seed = seed;
    auto result = viscobs::run_scenario(sc, out_dir, threads);
    int pass = 0, fail = 0;
    for (const auto& ch : result.checks) (ch.pass ? pass : fail)++;
    for (const auto& ch : result.checks)
      std::printf("[%s] %s  measured=%.6g expected=%.6g tol=%.3g\n",
                  ch.pass ? "PASS" : "FAIL", ch.name.c_str(), ch.measured, ch.expected,
                  ch.tolerance);
    for (const auto& note : result.notes) std::printf("note: %s\n", note.c_str());
    std::printf("%s: %d checks passed, %d failed; report in %s/report.json\n",
                sc.name.c_str(), pass, fail, out_dir.c_str());
    return result.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
