// lens-lab: run, list and validate lens experiments.
//
// Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 config error,
// 3 size guard.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lenslab/config.hpp"
#include "lenslab/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSize = 3;

void print_listing() {
  for (const auto& e : lenslab::experiment_registry()) {
    std::cout << e.name << "\n  " << e.description << "\n  topic: " << e.topic << "\n";
    std::cout << "  system: "
              << (e.system == lenslab::SystemUse::required   ? "required"
                  : e.system == lenslab::SystemUse::optional ? "optional (skew:alpha=...)"
                                                             : "none")
              << "\n  backends: " << (e.allows_float ? "rational, float" : "rational") << "\n";
    for (const auto& p : e.params)
      std::cout << "  " << p.name << " = " << p.default_value << "  (" << p.help << ")\n";
    for (const auto& s : e.series) {
      std::cout << "  csv " << e.name << "." << s.name << ".csv:";
      for (std::size_t c = 0; c < s.columns.size(); ++c) std::cout << (c ? "," : " ") << s.columns[c];
      std::cout << "\n";
    }
    std::cout << "\n";
  }
}

lenslab::ExperimentConfig load(const std::string& path, const std::vector<std::string>& overrides) {
  auto cfg = lenslab::load_config(path);
  for (const auto& o : overrides) lenslab::apply_override(cfg, o);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lens-lab: finite-resolution experiments on the lens of a measure-preserving map"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment and write its report");
  std::string run_config;
  std::vector<std::string> run_sets;
  std::string run_out;
  run->add_option("config", run_config, "Config file")->required();
  run->add_option("--set", run_sets, "Override a key: --set key=value")->take_all();
  run->add_option("--output-dir", run_out, "Override output_dir");

  auto* list = app.add_subcommand("list", "List the experiment registry");
  bool list_json = false;
  list->add_flag("--json", list_json, "Machine-readable listing");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  std::string val_config;
  std::vector<std::string> val_sets;
  validate->add_option("config", val_config, "Config file")->required();
  validate->add_option("--set", val_sets, "Override a key: --set key=value")->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*list) {
      if (list_json)
        std::cout << lenslab::registry_json().dump(2) << "\n";
      else
        print_listing();
      return kExitPass;
    }

    if (*validate) {
      const auto cfg = load(val_config, val_sets);
      const auto& info = lenslab::validate_config(cfg);
      std::cout << "ok: " << info.name << " (" << cfg.backend << ")\n";
      return kExitPass;
    }

    auto cfg = load(run_config, run_sets);
    if (!run_out.empty()) cfg.output_dir = run_out;
    const auto report = lenslab::run_experiment(cfg);
    const auto files = lenslab::write_report_files(report, cfg.output_dir);
    for (const auto& v : report.verdicts)
      std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "  observed=" << v.observed.dump()
                << "  tolerance: " << v.tolerance << "\n";
    std::cout << "report: " << files.front().string() << "\n";
    return report.passed() ? kExitPass : kExitVerdict;
  } catch (const lenslab::SizeGuard& e) {
    std::cerr << "size guard: " << e.what() << "\n";
    return kExitSize;
  } catch (const lenslab::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
