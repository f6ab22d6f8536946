// krflow: experiment runner for the radial Kaehler-Ricci flow library.
//
//   krflow presets
//   krflow run|soliton|flow|blowdown|decay [--preset P] [--config file.json]... [--key value]...
//
// Several --config files form a sweep; each runs on its own thread into its own output_dir.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <future>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "krflow/errors.hpp"
#include "krflow/experiment.hpp"
#include "krflow/io.hpp"

namespace {

enum Exit { kPass = 0, kVerdictFail = 1, kConfigError = 2, kNumericalFailure = 3 };

int exit_for(krf::ErrorKind k) {
  using krf::ErrorKind;
  switch (k) {
    case ErrorKind::Singularity:
    case ErrorKind::NoConvergence:
    case ErrorKind::StabilityViolation:
    case ErrorKind::TooCloseToBoundary:
    case ErrorKind::InterpolationRangeExceeded:
    case ErrorKind::AllZeroQuantity:
      return kNumericalFailure;
    default:
      return kConfigError;
  }
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// --key value and --key=value pairs from the unparsed tail
std::vector<std::pair<std::string, std::string>> parse_flags(const std::vector<std::string>& rest) {
  std::vector<std::pair<std::string, std::string>> flags;
  for (size_t i = 0; i < rest.size(); ++i) {
    const auto& a = rest[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3)
      krf::fail(krf::ErrorKind::ConfigInvalid, "unexpected argument '" + a + "' (flags are --key value)");
    auto eq = a.find('=');
    if (eq != std::string::npos) {
      flags.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
      continue;
    }
    if (i + 1 >= rest.size()) krf::fail(krf::ErrorKind::ConfigInvalid, a + ": missing value");
    flags.emplace_back(a.substr(2), rest[++i]);
  }
  return flags;
}

struct Outcome {
  int code = kPass;
  std::string log;
};

Outcome run_one(const krf::ConfigLayers& layers, krf::Task task, const std::string& origin) {
  Outcome out;
  std::string scenario = origin;
  try {
    const auto config = krf::resolve_config(layers);
    scenario = config.preset ? krf::to_string(*config.preset) : origin;
    const auto t0 = std::chrono::steady_clock::now();
    const auto started = utc_now();
    const auto report = krf::run_experiment(config, task);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::ordered_json meta;
    meta["scenario"] = report.scenario;
    meta["task"] = krf::to_string(task);
    meta["started_utc"] = started;
    meta["wall_seconds"] = seconds;
    krf::write_report(config, report, meta.dump(2) + "\n");
    for (const auto& v : report.verdicts)
      out.log += std::string(v.pass ? "[PASS] " : "[FAIL] ") + report.scenario + " " + v.name +
                 " measured=" + krf::io::format_double(v.measured) +
                 " expected=" + krf::io::format_double(v.expected) +
                 " tolerance=" + krf::io::format_double(v.tolerance) + "\n";
    out.log += report.scenario + ": wrote " + config.output_dir + "\n";
    out.code = report.all_pass() ? kPass : kVerdictFail;
  } catch (const krf::Error& e) {
    out.code = exit_for(e.kind());
    out.log = "error [" + scenario + "] " + e.what() + "\n";
  } catch (const std::exception& e) {
    out.code = kNumericalFailure;
    out.log = "error [" + scenario + "] " + e.what() + "\n";
  }
  return out;
}

int severity(int code) {
  // configuration problems outrank numerical failures, which outrank failed verdicts
  switch (code) {
    case kConfigError: return 3;
    case kNumericalFailure: return 2;
    case kVerdictFail: return 1;
    default: return 0;
  }
}

int print_presets() {
  for (const auto& p : krf::list_presets())
    std::printf("%-20s %s\n%-20s   exercises: %s\n", p.name.c_str(), p.description.c_str(), "", p.claims.c_str());
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial Kaehler-Ricci flow experiment runner"};
  app.require_subcommand(1);
  app.add_subcommand("presets", "list the built-in presets");

  std::string preset;
  std::vector<std::string> configs;
  const std::pair<const char*, krf::Task> tasks[] = {{"run", krf::Task::Run},
                                                     {"soliton", krf::Task::Soliton},
                                                     {"flow", krf::Task::Flow},
                                                     {"blowdown", krf::Task::Blowdown},
                                                     {"decay", krf::Task::Decay}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, task] : tasks) {
    auto* sub = app.add_subcommand(name, std::string(name) + " a configured experiment");
    sub->add_option("--preset", preset, "preset name (see `presets`)");
    sub->add_option("--config", configs, "JSON config file; repeat for a concurrent sweep");
    sub->allow_extras();
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kConfigError;
  }
  if (app.got_subcommand("presets")) return print_presets();

  krf::Task task = krf::Task::Run;
  CLI::App* active = nullptr;
  for (size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) active = subs[i], task = tasks[i].second;

  krf::ConfigLayers base;
  try {
    if (!preset.empty()) base.preset = preset;
    base.flags = parse_flags(active->remaining());
  } catch (const krf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }

  std::vector<std::pair<krf::ConfigLayers, std::string>> jobs;
  if (configs.empty()) {
    jobs.push_back({base, "custom"});
  } else {
    for (const auto& path : configs) {
      auto layers = base;
      try {
        layers.file_text = krf::io::read_file(path);
      } catch (const krf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
      }
      jobs.push_back({layers, path});
    }
  }

  std::vector<Outcome> outcomes;
  if (jobs.size() == 1) {
    outcomes.push_back(run_one(jobs[0].first, task, jobs[0].second));
  } else {
    // a sweep must not share output directories
    std::set<std::string> dirs;
    for (const auto& [layers, origin] : jobs) {
      try {
        if (!dirs.insert(krf::resolve_config(layers).output_dir).second) {
          std::cerr << "error: " << origin << ": output_dir shared with another sweep entry\n";
          return kConfigError;
        }
      } catch (const krf::Error& e) {
        std::cerr << "error [" << origin << "] " << e.what() << "\n";
        return kConfigError;
      }
    }
    std::vector<std::future<Outcome>> futures;
    for (const auto& [layers, origin] : jobs)
      futures.push_back(std::async(std::launch::async, run_one, layers, task, origin));
    for (auto& f : futures) outcomes.push_back(f.get());
  }

  int code = kPass;
  for (const auto& o : outcomes) {
    (o.code == kPass || o.code == kVerdictFail ? std::cout : std::cerr) << o.log;
    if (severity(o.code) > severity(code)) code = o.code;
  }
  return code;
}
