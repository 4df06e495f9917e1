#include "hqc/campaign.hpp"

#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "hqc/csv.hpp"

#ifndef HQC_VERSION
#define HQC_VERSION "0.0.0"
#endif

namespace hqc {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string category_name(error::category c) {
  switch (c) {
    case error::category::usage: return "usage";
    case error::category::layout: return "layout";
    case error::category::numerics: return "numerics";
    case error::category::physics_guard: return "physics_guard";
    case error::category::schema: return "schema";
    case error::category::integration: return "integration";
  }
  return "unknown";
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json complex_matrix(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

/// Runs task(i) for i in [0, n) on up to jobs threads.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex guard;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(guard);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void write_file(const fs::path& root, const std::string& rel, const std::string& text) {
  const fs::path p = root / rel;
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw usage_error(fmt::format("cannot write '{}'", p.string()));
  out << text;
  if (!out) throw usage_error(fmt::format("write to '{}' failed", p.string()));
}

/// Runs one scenario, turning library errors into a failed outcome.
ScenarioOutcome execute(const ScenarioConfig& s) {
  ScenarioOutcome o;
  o.name = s.name;
  try {
    o.report = run_gate(s.to_setup());
    o.ok = true;
  } catch (const guard_violation& e) {
    o.failure = e.kind();
    o.message = fmt::format("{} guard: {}", e.guard(), e.what());
  } catch (const error& e) {
    o.failure = e.kind();
    o.message = e.what();
  } catch (const std::exception& e) {
    o.failure = error::category::usage;
    o.message = e.what();
  }
  return o;
}

json environment(const CampaignConfig& cfg, std::uint64_t seed) {
  return {{"version", version()}, {"config_sha256", cfg.sha256}, {"seed", seed}};
}

std::uint64_t effective_seed(const CampaignConfig& cfg, const CampaignOptions& opt) {
  return opt.seed ? *opt.seed : cfg.scenarios.front().seed;
}

json outcome_status(const ScenarioOutcome& o) {
  json j;
  j["status"] = o.ok ? "ok" : "error";
  if (!o.ok) {
    j["category"] = category_name(*o.failure);
    j["message"] = o.message;
  }
  return j;
}

std::vector<Observable> population_observables(const ScenarioConfig& s) {
  const DfsEncoding enc = DfsEncoding::for_kind(s.kind);
  const auto embed = dfs_embedding(enc, s.layer, s.drive.fock_cutoff);
  const auto dim = Eigen::Index(layer_layout(enc, s.layer, s.drive.fock_cutoff).total_dim());
  std::vector<Observable> obs;
  for (std::size_t i = 0; i < embed.size(); ++i) {
    SparseMatrix p(dim, dim);
    p.insert(Eigen::Index(embed[i]), Eigen::Index(embed[i])) = 1.0;
    obs.push_back({"p_" + enc.labels[i], p});
  }
  return obs;
}

std::string summary_line(const ScenarioOutcome& o) {
  if (!o.ok) return fmt::format("{:<24} FAILED [{}] {}\n", o.name, category_name(*o.failure), o.message);
  const GateReport& r = *o.report;
  return fmt::format("{:<24} {:<9} {:<12} T = {:.6g} us  F = {:.6f}  berry = {}  trace err = {:.2e}\n", o.name,
                     to_string(r.kind), to_string(r.layer), r.total_time, r.fidelity,
                     r.berry_phase ? fmt::format("{:.6f}", *r.berry_phase) : std::string("n/a"), r.max_trace_error);
}

}  // namespace

bool CampaignResult::all_ok() const {
  for (const auto& o : outcomes)
    if (!o.ok) return false;
  return true;
}

std::optional<error::category> CampaignResult::first_failure() const {
  for (const auto& o : outcomes)
    if (!o.ok) return o.failure;
  return std::nullopt;
}

json report_json(const GateReport& r) {
  json j;
  j["kind"] = to_string(r.kind);
  j["layer"] = to_string(r.layer);
  j["initial_label"] = r.initial_label;
  j["schedule_id"] = r.schedule_id;
  j["fidelity"] = r.fidelity;
  j["total_time_us"] = r.total_time;
  j["ideal_angle_rad"] = r.ideal_angle;
  j["berry_phase_rad"] = optional_number(r.berry_phase);
  j["simulated_angle_rad"] = optional_number(r.simulated_angle);
  j["dark_leakage"] = r.dark_leakage;
  j["max_dark_leakage"] = r.max_dark_leakage;
  j["logical_population"] = r.logical_population;
  j["max_trace_error"] = r.max_trace_error;
  j["max_symmetrization"] = r.max_symmetrization;
  j["min_eigenvalue"] = r.min_eigenvalue;
  j["full_dim"] = r.full_dim;
  j["reduced_dim"] = r.reduced_dim;
  j["integrator"] = {{"accepted_steps", r.stats.accepted}, {"rejected_steps", r.stats.rejected}};
  j["logical_state"] = complex_matrix(r.logical_state);
  j["parameters"] = r.parameters;
  return j;
}

CampaignResult run_campaign(const CampaignConfig& cfg, const CampaignOptions& opt) {
  CampaignResult res;
  res.outcomes.resize(cfg.scenarios.size());
  const std::uint64_t seed = effective_seed(cfg, opt);
  parallel_for(cfg.scenarios.size(), opt.jobs, [&](std::size_t i) {
    const ScenarioConfig& s = cfg.scenarios[i];
    ScenarioOutcome o = execute(s);
    json rep;
    rep["scenario"] = s.name;
    rep["environment"] = environment(cfg, seed);
    rep["config"] = s.resolved();
    rep.update(outcome_status(o));
    if (o.ok) rep["report"] = report_json(*o.report);

    const std::string dir = s.output_dir;
    write_file(opt.out, dir + "/report.json", rep.dump(2) + "\n");
    o.files.push_back(dir + "/report.json");
    write_file(opt.out, dir + "/summary.txt", summary_line(o));
    o.files.push_back(dir + "/summary.txt");
    if (o.ok && s.write_trajectory) {
      std::ostringstream csv;
      const auto obs = population_observables(s);
      o.report->trajectory.write_csv(csv, obs);
      write_file(opt.out, dir + "/trajectory.csv", csv.str());
      o.files.push_back(dir + "/trajectory.csv");
    }
    res.outcomes[i] = std::move(o);
  });

  json scenarios = json::array();
  std::string summary = fmt::format("campaign  version {}  config sha256 {}\n", version(), cfg.sha256);
  for (const auto& o : res.outcomes) {
    json e;
    e["scenario"] = o.name;
    e.update(outcome_status(o));
    e["files"] = o.files;
    scenarios.push_back(e);
    summary += summary_line(o);
    res.files.insert(res.files.end(), o.files.begin(), o.files.end());
  }
  res.files.push_back("campaign.json");
  res.files.push_back("summary.txt");
  json camp;
  camp["environment"] = environment(cfg, seed);
  camp["scenarios"] = scenarios;
  camp["files"] = res.files;
  write_file(opt.out, "campaign.json", camp.dump(2) + "\n");
  write_file(opt.out, "summary.txt", summary);
  return res;
}

CampaignResult run_sweep(const CampaignConfig& cfg, const CampaignOptions& opt) {
  if (!cfg.sweep) throw usage_error("the config has no sweep section");
  const SweepSpec& sw = *cfg.sweep;
  if (sw.values.empty()) throw usage_error("the sweep has no values");
  const auto& axes = sweep_axes();
  if (std::find(axes.begin(), axes.end(), sw.axis) == axes.end())
    throw usage_error(fmt::format("unknown sweep axis '{}'", sw.axis));

  CampaignResult res;
  res.outcomes.resize(sw.values.size());
  const ScenarioConfig& base = cfg.scenarios.front();
  parallel_for(sw.values.size(), opt.jobs, [&](std::size_t i) {
    ScenarioConfig s = base;
    s.name = fmt::format("{}[{}]", base.name, i);
    try {
      apply_axis(s, sw.axis, sw.values[i]);
      res.outcomes[i] = execute(s);
    } catch (const error& e) {
      res.outcomes[i].name = s.name;
      res.outcomes[i].failure = e.kind();
      res.outcomes[i].message = e.what();
    }
  });

  const std::vector<std::string> head{sw.axis,           "fidelity",         "berry_phase",  "simulated_angle",
                                      "ideal_angle",     "total_time_us",    "logical_population",
                                      "max_dark_leakage", "max_trace_error", "min_eigenvalue", "status", "message"};
  std::string csv = csv_row(head);
  json rows = json::array();
  std::string summary = fmt::format("sweep over {}  version {}  config sha256 {}\n", sw.axis, version(), cfg.sha256);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < sw.values.size(); ++i) {
    const ScenarioOutcome& o = res.outcomes[i];
    std::vector<std::string> f{csv_number(sw.values[i])};
    if (o.ok) {
      const GateReport& r = *o.report;
      for (double v : {r.fidelity, r.berry_phase.value_or(nan), r.simulated_angle.value_or(nan), r.ideal_angle,
                       r.total_time, r.logical_population, r.max_dark_leakage, r.max_trace_error, r.min_eigenvalue})
        f.push_back(csv_number(v));
      f.push_back("ok");
      f.push_back("");
    } else {
      for (int k = 0; k < 9; ++k) f.push_back(csv_number(nan));
      f.push_back("error");
      f.push_back(category_name(*o.failure) + ": " + o.message);
    }
    csv += csv_row(f);
    json row;
    row["index"] = i;
    row["value"] = sw.values[i];
    row.update(outcome_status(o));
    if (o.ok) row["report"] = report_json(*o.report);
    rows.push_back(row);
    summary += fmt::format("{} = {:<14.8g} ", sw.axis, sw.values[i]) + summary_line(o);
  }
  json doc;
  doc["environment"] = environment(cfg, effective_seed(cfg, opt));
  doc["config"] = base.resolved();
  doc["axis"] = sw.axis;
  doc["rows"] = rows;
  res.files = {"sweep.csv", "sweep.json", "summary.txt"};
  doc["files"] = res.files;
  write_file(opt.out, "sweep.csv", csv);
  write_file(opt.out, "sweep.json", doc.dump(2) + "\n");
  write_file(opt.out, "summary.txt", summary);
  return res;
}

json validate_campaign(const CampaignConfig& cfg) {
  json doc;
  doc["config_sha256"] = cfg.sha256;
  json list = json::array();
  for (const auto& s : cfg.scenarios) {
    validate_setup(s.to_setup());
    list.push_back(s.resolved());
  }
  doc["scenarios"] = list;
  if (cfg.sweep) {
    for (double v : cfg.sweep->values) {
      ScenarioConfig s = cfg.scenarios.front();
      apply_axis(s, cfg.sweep->axis, v);
      validate_setup(s.to_setup());
    }
    doc["sweep"] = {{"axis", cfg.sweep->axis}, {"values", cfg.sweep->values}};
  }
  return doc;
}

int exit_code(error::category c) {
  switch (c) {
    case error::category::schema: return 2;
    case error::category::physics_guard: return 3;
    case error::category::integration: return 4;
    default: return 1;
  }
}

std::string version() { return HQC_VERSION; }

}  // namespace hqc
