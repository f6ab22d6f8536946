#include <filesystem>
#include <set>

#include <json.hpp>

#include "helpers.hpp"
#include "krflow/experiment.hpp"

using namespace krf;
using krf::test::kind_of;
namespace fs = std::filesystem;

namespace {

std::string config_error(const ConfigLayers& layers) {
  try {
    resolve_config(layers);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigInvalid);
    return e.what();
  }
  FAIL("expected ConfigInvalid");
  return {};
}

}  // namespace

TEST_CASE("preset table") {
  const auto& presets = list_presets();
  REQUIRE(presets.size() == 9);
  const char* order[] = {"flat-cone",        "cylinder-split",      "bulging-preserve",
                         "bulging-blowdown", "conical-preserve",    "conical-soliton",
                         "fik-selfsimilar",  "decay-appendix",      "bilipschitz-plateau"};
  for (size_t i = 0; i < presets.size(); ++i) {
    CHECK(presets[i].name == order[i]);
    CHECK_FALSE(presets[i].description.empty());
    CHECK_FALSE(presets[i].claims.empty());
    CHECK(preset_from_string(presets[i].name) == presets[i].preset);
    CHECK(to_string(presets[i].preset) == presets[i].name);
  }
  CHECK(presets[6].claims.find("self-similar") != std::string::npos);
  CHECK(&list_presets() == &presets);
  CHECK(kind_of([] { preset_from_string("round-sphere"); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("config serialization round-trips bitwise") {
  for (const auto& info : list_presets()) {
    auto c = preset_config(info.preset);
    c.base.lambda = 0.1 + 0.2;
    c.grid.rho_max += 1.0 / 3.0;
    c.analysis.tolerances["exponent"] = 5e-324;
    const auto text = config_to_json(c);
    const auto back = config_from_json(text);
    CHECK(config_to_json(back) == text);
    CHECK(back.base.lambda == c.base.lambda);
    CHECK(back.grid.rho_max == c.grid.rho_max);
    CHECK(back.analysis.tolerances.at("exponent") == 5e-324);
  }
}

TEST_CASE("preset < file < flag") {
  ConfigLayers l;
  l.preset = "bulging-preserve";
  l.file_text = R"({"grid": {"points": 300}, "flow": {"horizon": 1.5}, "analysis": {"order": 4}})";
  l.flags = {{"points", "301"}, {"analysis.order", "5"}};
  const auto c = resolve_config(l);
  CHECK(c.grid.points == 301);
  CHECK(c.flow.horizon == 1.5);
  CHECK(c.analysis.order == 5);
  // untouched preset fields survive
  CHECK(c.grid.rho_max == 20000.0);
  CHECK(c.regime.kind == RegimeKind::Bulging);
  CHECK(c.preset == Preset::BulgingPreserve);

  ConfigLayers only_file;
  only_file.file_text = R"({"preset": "flat-cone", "grid": {"points": 129}})";
  const auto f = resolve_config(only_file);
  CHECK(f.preset == Preset::FlatCone);
  CHECK(f.grid.points == 129);
  only_file.preset = "cylinder-split";
  const auto g = resolve_config(only_file);
  CHECK(g.preset == Preset::CylinderSplit);
  CHECK(g.base.mu == 0);
  CHECK(g.grid.points == 129);

  ConfigLayers strings;
  strings.flags = {{"scheme", "ExplicitRK4"}, {"lambda", "2.5"}};
  const auto s = resolve_config(strings);
  CHECK(s.flow.scheme == TimeScheme::ExplicitRK4);
  CHECK(s.base.lambda == 2.5);
}

TEST_CASE("invalid configs name the field") {
  ConfigLayers l;
  l.file_text = R"({"grid": {"pionts": 3}})";
  CHECK(config_error(l).find("config.grid.pionts") != std::string::npos);
  l.file_text = R"({"grid": {"points": 3}})";
  CHECK(config_error(l).find("config.grid.points") != std::string::npos);
  l.file_text = R"({"flow": {"scheme": "Euler"}})";
  CHECK(config_error(l).find("config.flow.scheme") != std::string::npos);
  l.file_text = R"({"analysis": {"tolerances": {"nonsense": 1}}})";
  CHECK(config_error(l).find("config.analysis.tolerances.nonsense") != std::string::npos);
  l.file_text = "{ not json";
  CHECK_FALSE(config_error(l).empty());
  l.file_text.reset();
  l.preset = "no-such-preset";
  CHECK_FALSE(config_error(l).empty());
}

TEST_CASE("flat-cone run passes and is deterministic") {
  auto c = preset_config(Preset::FlatCone);
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  CHECK(a.scenario == "flat-cone");
  CHECK(a.all_pass());
  std::set<std::string> names;
  for (const auto& v : a.verdicts) names.insert(v.name);
  CHECK(names == std::set<std::string>{"curvature_zero", "stationary"});
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (size_t i = 0; i < a.artifacts.size(); ++i) {
    CHECK(a.artifacts[i].name == b.artifacts[i].name);
    CHECK(a.artifacts[i].content == b.artifacts[i].content);
  }
  CHECK(summary_json(a) == summary_json(b));
}

TEST_CASE("cylinder-split summary records drift and slope") {
  const auto r = run_experiment(preset_config(Preset::CylinderSplit));
  CHECK(r.all_pass());
  const auto j = nlohmann::json::parse(summary_json(r));
  CHECK(j["scenario"] == "cylinder-split");
  for (const auto& v : j["verdicts"]) {
    CHECK(v.contains("paper_ref"));
    CHECK(v.contains("tolerance"));
    if (v["name"] == "phi_slope") CHECK(v["expected"].get<double>() == -1.0);
    if (v["name"] == "psi_drift") CHECK(v["measured"].get<double>() <= 1e-8);
  }
}

TEST_CASE("tightened tolerances turn verdicts into failures") {
  auto c = preset_config(Preset::FlatCone);
  c.analysis.tolerances["curvature_zero"] = 0.0;
  CHECK_FALSE(run_experiment(c).all_pass());
}

TEST_CASE("reports land on disk with the resolved config") {
  auto c = preset_config(Preset::FlatCone);
  const auto dir = fs::temp_directory_path() / "krflow_unit_report";
  fs::remove_all(dir);
  c.output_dir = dir.string();
  const auto r = run_experiment(c);
  write_report(c, r, "{\"wall_seconds\": 0}\n");
  for (const char* f : {"config.resolved.json", "summary.json", "run_metadata.json", "curvature.csv", "drift.csv"})
    CHECK(fs::exists(dir / f));
  const auto back = config_from_json(io::read_file((dir / "config.resolved.json").string()));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(io::read_file((dir / "summary.json").string()) == summary_json(r));
  fs::remove_all(dir);
}

TEST_CASE("self-similar boundary is reserved for the blowdown task") {
  auto c = preset_config(Preset::ConicalPreserve);
  c.flow.bc_kind = BoundaryKind::SelfSimilar;
  CHECK(kind_of([&] { run_experiment(c); }) == ErrorKind::ConfigInvalid);
}
