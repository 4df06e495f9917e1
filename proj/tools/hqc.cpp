// hqc: config-driven runner for holonomic gate simulations.
//
//   hqc run      --config phase_gate.yaml [--out DIR] [--jobs N] [--seed S]
//   hqc sweep    --config sweep_phi_c.yaml [--axis phi_c --values pi/4,pi/2,pi]
//   hqc validate --config cp_gate.yaml
//
// Without --out, results go to $HQC_OUTPUT_ROOT/<config name> (default root:
// ./hqc_out). Exit status: 0 success, 2 schema, 3 physics guard,
// 4 integration, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hqc/campaign.hpp"

namespace {

namespace fs = std::filesystem;

fs::path output_dir(const std::string& out, const std::string& config) {
  if (!out.empty()) return out;
  const char* root = std::getenv("HQC_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "hqc_out") / fs::path(config).stem();
}

int report_error(const hqc::error& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (auto g = dynamic_cast<const hqc::guard_violation*>(&e)) std::cerr << "guard: " << g->guard() << "\n";
  return hqc::exit_code(e.kind());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holonomic gate simulation campaigns"};
  app.set_version_flag("--version", hqc::version());
  app.require_subcommand(1);

  std::string config, out, axis;
  std::vector<std::string> values;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;

  auto common = [&](CLI::App* sub, bool runs) {
    sub->add_option("--config", config, "scenario file (YAML)")->required()->check(CLI::ExistingFile);
    if (!runs) return;
    sub->add_option("--out", out, "output directory");
    sub->add_option("--jobs", jobs, "parallel scenarios")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed recorded with the outputs");
  };
  auto* run = app.add_subcommand("run", "run every scenario of a config");
  common(run, true);
  auto* sweep = app.add_subcommand("sweep", "scan one numeric field of the first scenario");
  common(sweep, true);
  sweep->add_option("--axis", axis, "field to scan (overrides the config)");
  sweep->add_option("--values", values, "values for --axis, with units")->delimiter(',');
  auto* validate = app.add_subcommand("validate", "check a config and print it with defaults resolved");
  common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    hqc::CampaignConfig cfg = hqc::load_campaign(config);
    if (validate->parsed()) {
      std::cout << hqc::validate_campaign(cfg).dump(2) << "\n";
      return 0;
    }
    hqc::CampaignOptions opt;
    opt.out = output_dir(out, config);
    opt.jobs = jobs;
    opt.seed = seed;

    if (run->parsed()) {
      auto res = hqc::run_campaign(cfg, opt);
      for (const auto& o : res.outcomes) {
        if (o.ok) std::cout << fmt::format("{}: F = {:.6f}\n", o.name, o.report->fidelity);
        else std::cerr << fmt::format("{}: error: {}\n", o.name, o.message);
      }
      std::cout << "results in " << opt.out.string() << "\n";
      if (auto f = res.first_failure()) return hqc::exit_code(*f);
      return 0;
    }

    if (!axis.empty() || !values.empty()) {
      if (axis.empty() || values.empty()) throw hqc::schema_error("sweep", "--axis and --values go together");
      hqc::SweepSpec s{axis, {}};
      const auto& axes = hqc::sweep_axes();
      if (std::find(axes.begin(), axes.end(), axis) == axes.end())
        throw hqc::schema_error("sweep.axis", fmt::format("unknown axis '{}'", axis));
      for (const auto& v : values) s.values.push_back(hqc::parse_axis_value(axis, v));
      cfg.sweep = s;
    }
    auto res = hqc::run_sweep(cfg, opt);
    std::size_t failed = 0;
    for (const auto& o : res.outcomes) failed += o.ok ? 0 : 1;
    std::cout << fmt::format("{} rows, {} failed; results in {}\n", res.outcomes.size(), failed, opt.out.string());
    return 0;
  } catch (const hqc::error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
