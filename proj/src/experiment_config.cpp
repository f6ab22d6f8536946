#include <cmath>
#include <set>

#include <json.hpp>

#include "krflow/decay_monitor.hpp"
#include "krflow/errors.hpp"
#include "krflow/experiment.hpp"
#include "krflow/finite_difference.hpp"

namespace krf {

using json = nlohmann::ordered_json;

namespace {

struct PresetRow {
  Preset preset;
  const char* name;
  const char* description;
  const char* claims;
};

const PresetRow kPresets[] = {
    {Preset::FlatCone, "flat-cone", "flat cone with lambda = n on a short grid",
     "flat cone: curvature vanishes and the flow is stationary"},
    {Preset::CylinderSplit, "cylinder-split", "cylindrical end (mu = 0) evolved to t = 1",
     "product splitting: fiber coefficient constant, base coefficient linear with slope -lambda"},
    {Preset::BulgingPreserve, "bulging-preserve", "bulging model end, N = 2, lambda = 1, evolved to t = 1",
     "finite-time bulging asymptotics and the |Rm| decay exponent -2/3 are preserved"},
    {Preset::BulgingBlowdown, "bulging-blowdown", "bulging rescalings at r^2 = 16 and 64 for N = n = 2",
     "bulging blowdown converges to the divisor flow times a flat factor"},
    {Preset::ConicalPreserve, "conical-preserve", "conical end with a logarithmic term, lambda = 3",
     "cone coefficient preserved; constant slot drifts linearly with slope n - lambda"},
    {Preset::ConicalSoliton, "conical-soliton", "formal expanding soliton series next to the numerical soliton",
     "soliton recursion, gradient identity and the residual order of truncations"},
    {Preset::FikSelfSimilar, "fik-selfsimilar", "FIK family built from the soliton profile B",
     "self-similarity: the FIK family is an expanding gradient soliton solution of the flow"},
    {Preset::DecayAppendix, "decay-appendix", "curvature decay rates on a conical end, lambda = 3",
     "Ricci decay rate -2 preserved; every covariant derivative gains one order of decay"},
    {Preset::BilipschitzPlateau, "bilipschitz-plateau", "sup |Rm| on a fixed ball for horizons 1, 2, 4, 8",
     "bilipschitz control bounds |Rm| independently of the horizon"},
};

// verdict names whose tolerance a preset reads
std::set<std::string> tolerance_keys(Preset p) {
  switch (p) {
    case Preset::FlatCone: return {"curvature_zero", "stationary"};
    case Preset::CylinderSplit: return {"psi_drift", "phi_linear"};
    case Preset::BulgingPreserve: return {"leading_coefficient_drift", "exponent", "exponent_drift"};
    case Preset::BulgingBlowdown: return {"product_limit", "error_ratio"};
    case Preset::ConicalPreserve: return {"cone_coefficient_drift", "constant_slope"};
    case Preset::ConicalSoliton:
      return {"a1_exact", "gradient_identity", "residual_slope", "soliton_constant", "soliton_b1"};
    case Preset::FikSelfSimilar: return {"family_residual", "flat_case"};
    case Preset::DecayAppendix: return {"exponent", "exponent_drift", "derivative_ladder"};
    case Preset::BilipschitzPlateau: return {"c1_bounded", "rm_growth"};
  }
  return {};
}

std::vector<double> steps(double lo, double step, int count) {
  std::vector<double> v;
  for (int k = 0; k < count; ++k) v.push_back(lo + step * k);
  return v;
}

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  fail(ErrorKind::ConfigInvalid, path + ": " + what);
}

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) invalid(sub(it.key()), "unknown field");
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string sub(const std::string& key) const { return path_ + "." + key; }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) invalid(sub(key), "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) invalid(sub(key), "must be finite");
    return x;
  }
  std::optional<double> optional_number(const char* key) const {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }
  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) invalid(sub(key), "expected an integer");
    return v.get<int>();
  }
  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) invalid(sub(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const char* key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array()) invalid(sub(key), "expected an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) invalid(sub(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<std::string> texts(const char* key, std::vector<std::string> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array()) invalid(sub(key), "expected an array of strings");
    std::vector<std::string> out;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) invalid(sub(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }
  Reader child(const char* key) const {
    if (!has(key)) return Reader(empty(), sub(key));
    return Reader(j_.at(key), sub(key));
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  const json& j_;
  std::string path_;
};

void check_window(const std::vector<double>& w, const std::string& path) {
  if (w.empty()) return;
  if (w.size() != 2 || !(w[0] < w[1])) invalid(path, "expected [lo, hi] with lo < hi");
}

template <class F>
auto rethrow_as_config(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    std::string what = e.what();
    const std::string tag = std::string(to_string(ErrorKind::ConfigInvalid)) + ": ";
    if (what.rfind(tag, 0) == 0) what.erase(0, tag.size());
    if (what.rfind("config.", 0) == 0) throw;
    invalid(path, what);
  }
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["preset"] = c.preset ? json(to_string(*c.preset)) : json(nullptr);
  j["base"] = {{"n", c.base.n}, {"lambda", c.base.lambda}, {"mu", c.base.mu}, {"orbifold_k", c.base.orbifold_k}};
  json r;
  r["kind"] = to_string(c.regime.kind);
  auto put = [&](const char* k, const std::optional<double>& v) {
    if (v) r[k] = *v;
  };
  put("c", c.regime.c);
  put("N", c.regime.N);
  put("k_log", c.regime.k_log);
  put("p", c.regime.p);
  put("t0", c.regime.t0);
  put("offset", c.regime.offset);
  if (!c.regime.b_table.empty()) r["b_table"] = c.regime.b_table;
  j["regime"] = r;
  j["grid"] = {{"rho_min", c.grid.rho_min}, {"rho_max", c.grid.rho_max}, {"points", c.grid.points}};
  j["flow"] = {{"horizon", c.flow.horizon},
               {"dt", c.flow.dt},
               {"scheme", to_string(c.flow.scheme)},
               {"bc_kind", to_string(c.flow.bc_kind)},
               {"output_times", c.flow.output_times}};
  const auto& a = c.analysis;
  json an;
  an["order"] = a.order;
  an["fit_window"] = a.fit_window;
  an["residual_window"] = a.residual_window;
  an["scales"] = a.scales;
  an["rescaled_times"] = a.rescaled_times;
  an["rescaled_window"] = a.rescaled_window;
  an["quantities"] = a.quantities;
  an["sample_times"] = a.sample_times;
  an["horizons"] = a.horizons;
  an["ball"] = a.ball;
  if (a.expected_exponent) an["expected_exponent"] = *a.expected_exponent;
  json tol = json::object();
  for (const auto& [k, v] : a.tolerances) tol[k] = v;
  an["tolerances"] = tol;
  j["analysis"] = an;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig from_json(const json& j) {
  Reader top(j, "config");
  top.allow({"preset", "base", "regime", "grid", "flow", "analysis", "output_dir"});
  ExperimentConfig c;
  if (top.has("preset")) {
    auto name = top.text("preset", "");
    c.preset = rethrow_as_config("config.preset", [&] { return preset_from_string(name); });
  }

  auto b = top.child("base");
  b.allow({"n", "lambda", "mu", "orbifold_k"});
  c.base.n = b.integer("n", 2);
  c.base.lambda = b.number("lambda", 0.0);
  c.base.mu = b.integer("mu", 1);
  c.base.orbifold_k = b.integer("orbifold_k", 1);
  rethrow_as_config("config.base", [&] {
    c.base.validate();
    return 0;
  });

  auto r = top.child("regime");
  r.allow({"kind", "c", "N", "k_log", "p", "t0", "offset", "b_table"});
  auto kind = r.text("kind", "Conical");
  c.regime.kind = rethrow_as_config("config.regime.kind", [&] { return regime_from_string(kind); });
  c.regime.c = r.optional_number("c");
  c.regime.N = r.optional_number("N");
  c.regime.k_log = r.optional_number("k_log");
  c.regime.p = r.optional_number("p");
  c.regime.t0 = r.optional_number("t0");
  c.regime.offset = r.optional_number("offset");
  c.regime.b_table = r.text("b_table", "");

  auto g = top.child("grid");
  g.allow({"rho_min", "rho_max", "points"});
  c.grid.rho_min = g.number("rho_min", c.grid.rho_min);
  c.grid.rho_max = g.number("rho_max", c.grid.rho_max);
  c.grid.points = g.integer("points", c.grid.points);
  if (c.grid.points < fd::kMinPoints) invalid("config.grid.points", "needs at least 5 points");
  if (!(c.grid.rho_min < c.grid.rho_max)) invalid("config.grid", "rho_min must be below rho_max");

  auto f = top.child("flow");
  f.allow({"horizon", "dt", "scheme", "bc_kind", "output_times"});
  c.flow.horizon = f.number("horizon", c.flow.horizon);
  c.flow.dt = f.number("dt", c.flow.dt);
  auto scheme = f.text("scheme", to_string(c.flow.scheme));
  c.flow.scheme = rethrow_as_config("config.flow.scheme", [&] { return scheme_from_string(scheme); });
  auto bc = f.text("bc_kind", to_string(c.flow.bc_kind));
  c.flow.bc_kind = rethrow_as_config("config.flow.bc_kind", [&] { return boundary_from_string(bc); });
  c.flow.output_times = f.numbers("output_times", {});
  if (!(c.flow.horizon > 0.0)) invalid("config.flow.horizon", "must be positive");
  if (c.flow.dt < 0.0) invalid("config.flow.dt", "must be non-negative");
  for (double t : c.flow.output_times)
    if (t < 0.0 || t > c.flow.horizon) invalid("config.flow.output_times", "times must lie in [0, horizon]");

  auto a = top.child("analysis");
  a.allow({"order", "fit_window", "residual_window", "scales", "rescaled_times", "rescaled_window", "quantities",
           "sample_times", "horizons", "ball", "expected_exponent", "tolerances"});
  auto& an = c.analysis;
  an.order = a.integer("order", an.order);
  if (an.order < 1 || an.order > 12) invalid("config.analysis.order", "must lie in 1..12");
  an.fit_window = a.numbers("fit_window", {});
  an.residual_window = a.numbers("residual_window", {});
  an.scales = a.numbers("scales", {});
  an.rescaled_times = a.numbers("rescaled_times", {});
  an.rescaled_window = a.numbers("rescaled_window", {});
  an.quantities = a.texts("quantities", {});
  an.sample_times = a.numbers("sample_times", {});
  an.horizons = a.numbers("horizons", {});
  an.ball = a.numbers("ball", {});
  an.expected_exponent = a.optional_number("expected_exponent");
  check_window(an.fit_window, "config.analysis.fit_window");
  check_window(an.residual_window, "config.analysis.residual_window");
  check_window(an.rescaled_window, "config.analysis.rescaled_window");
  check_window(an.ball, "config.analysis.ball");
  for (size_t i = 0; i < an.quantities.size(); ++i) {
    auto path = "config.analysis.quantities[" + std::to_string(i) + "]";
    rethrow_as_config(path, [&] { return DecayQuantity::parse(an.quantities[i]); });
  }
  for (double s : an.scales)
    if (!(s > 0.0)) invalid("config.analysis.scales", "scales must be positive");
  for (double h : an.horizons)
    if (!(h > 0.0)) invalid("config.analysis.horizons", "horizons must be positive");

  auto tol = a.child("tolerances");
  if (a.has("tolerances")) {
    const auto& tj = j.at("analysis").at("tolerances");
    std::set<std::string> known = {"ode_residual", "blowdown_w1"};
    for (const auto& row : kPresets)
      for (const auto& k : tolerance_keys(row.preset)) known.insert(k);
    for (auto it = tj.begin(); it != tj.end(); ++it) {
      if (!known.count(it.key())) invalid(tol.sub(it.key()), "not a known verdict");
      double v = tol.number(it.key().c_str(), 0.0);
      if (v < 0.0) invalid(tol.sub(it.key()), "tolerance must be non-negative");
      an.tolerances[it.key()] = v;
    }
  }

  c.output_dir = top.text("output_dir", c.output_dir);
  if (c.output_dir.empty()) invalid("config.output_dir", "must not be empty");
  return c;
}

void set_path(json& j, const std::string& dotted, json value) {
  json* node = &j;
  size_t start = 0;
  while (true) {
    auto dot = dotted.find('.', start);
    std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) invalid("--" + dotted, "malformed key");
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    auto& next = (*node)[key];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) invalid("--" + dotted, "'" + key + "' is not an object");
    node = &next;
    start = dot + 1;
  }
}

}  // namespace

const char* to_string(Preset p) {
  for (const auto& row : kPresets)
    if (row.preset == p) return row.name;
  return "unknown";
}

Preset preset_from_string(const std::string& name) {
  for (const auto& row : kPresets)
    if (name == row.name) return row.preset;
  fail(ErrorKind::ConfigInvalid, "unknown preset '" + name + "'");
}

const std::vector<PresetInfo>& list_presets() {
  static const std::vector<PresetInfo> table = [] {
    std::vector<PresetInfo> t;
    for (const auto& row : kPresets) t.push_back({row.preset, row.name, row.description, row.claims});
    return t;
  }();
  return table;
}

std::vector<double> ExperimentConfig::rho_grid() const {
  return fd::uniform_grid(grid.rho_min, grid.rho_max, grid.points);
}

ExperimentConfig preset_config(Preset p) {
  ExperimentConfig c;
  c.preset = p;
  c.output_dir = std::string("krflow_out/") + to_string(p);
  auto& an = c.analysis;
  const std::vector<double> quarters = {0.25, 0.5, 0.75, 1.0};
  switch (p) {
    case Preset::FlatCone:
      c.base = {2, 2.0, 1, 1};
      c.regime.kind = RegimeKind::Conical;
      c.regime.k_log = 0.0;
      c.grid = {0.0, 6.0, 257};
      c.flow.output_times = quarters;
      an.tolerances = {{"curvature_zero", 1e-6}, {"stationary", 1e-8}};
      break;
    case Preset::CylinderSplit:
      c.base = {2, 1.0, 0, 1};
      c.regime.kind = RegimeKind::Cylindrical;
      c.regime.c = 1.0;
      c.regime.offset = 1.5;
      c.grid = {0.0, 6.0, 257};
      c.flow.output_times = quarters;
      an.tolerances = {{"psi_drift", 1e-8}, {"phi_linear", 1e-8}};
      break;
    case Preset::BulgingPreserve:
      c.base = {2, 1.0, 1, 1};
      c.regime.kind = RegimeKind::Bulging;
      c.regime.N = 2.0;
      c.grid = {100.0, 20000.0, 2048};
      c.flow.output_times = quarters;
      an.fit_window = {15000.0, 19900.0};
      an.quantities = {"RmNorm"};
      an.sample_times = {0.0, 0.5, 1.0};
      an.expected_exponent = -2.0 / 3.0;
      an.tolerances = {{"leading_coefficient_drift", 0.01}, {"exponent", 0.05}, {"exponent_drift", 0.05}};
      break;
    case Preset::BulgingBlowdown:
      c.base = {2, -1.0, 1, 1};
      c.regime.kind = RegimeKind::Bulging;
      c.regime.N = 2.0;
      c.grid = {1.0, 80.0, 2048};
      an.scales = {16.0, 64.0};
      an.rescaled_times = steps(0.0, 0.05, 11);
      an.rescaled_window = {-0.25, 0.25};
      an.tolerances = {{"product_limit", 0.02}, {"error_ratio", 0.75}};
      break;
    case Preset::ConicalPreserve:
      c.base = {2, 3.0, 1, 1};
      c.regime.kind = RegimeKind::Conical;
      c.regime.k_log = 1.0;
      c.grid = {2.0, 14.0, 2048};
      c.flow.output_times = quarters;
      an.fit_window = {8.0, 13.9};
      an.tolerances = {{"cone_coefficient_drift", 0.01}, {"constant_slope", 0.02}};
      break;
    case Preset::ConicalSoliton:
      c.base = {2, 3.0, 1, 1};
      c.regime.kind = RegimeKind::Conical;
      c.regime.k_log = 0.0;
      c.grid = {2.0, 14.0, 2048};
      an.fit_window = {5.0, 12.0};
      an.residual_window = {8.0, 14.0};
      an.tolerances = {{"a1_exact", 0.0},
                       {"gradient_identity", 0.0},
                       {"residual_slope", 0.05},
                       {"soliton_constant", 1e-6},
                       {"soliton_b1", 1e-4}};
      break;
    case Preset::FikSelfSimilar:
      c.base = {2, 3.0, 1, 1};
      c.regime.kind = RegimeKind::FIK;
      c.regime.p = 2.0 / 3.0;
      c.regime.t0 = 1.0;
      c.grid = {2.0, 14.0, 2048};
      an.sample_times = {0.0, 0.5, 1.0, 3.0};
      an.tolerances = {{"family_residual", 1e-6}, {"flat_case", 1e-8}};
      break;
    case Preset::DecayAppendix:
      c.base = {2, 3.0, 1, 1};
      c.regime.kind = RegimeKind::Conical;
      c.regime.k_log = 1.0;
      c.grid = {2.0, 14.0, 2048};
      an.quantities = {"RicciNorm", "RmNorm", "CovDerivRm(1)", "CovDerivRm(2)"};
      an.sample_times = {0.0, 1.0};
      an.expected_exponent = -2.0;
      an.tolerances = {{"exponent", 0.05}, {"exponent_drift", 0.05}, {"derivative_ladder", 0.05}};
      break;
    case Preset::BilipschitzPlateau:
      c.base = {2, 3.0, 1, 1};
      c.regime.kind = RegimeKind::Conical;
      c.regime.k_log = 0.0;
      c.grid = {3.0, 14.0, 1024};
      c.flow.horizon = 8.0;
      an.horizons = {1.0, 2.0, 4.0, 8.0};
      an.ball = {4.0, 6.0};
      an.tolerances = {{"c1_bounded", 10.0}, {"rm_growth", 0.05}};
      break;
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid("config", std::string("not valid JSON: ") + e.what());
  }
  return from_json(j);
}

const std::map<std::string, std::string>& flag_aliases() {
  static const std::map<std::string, std::string> aliases = {
      {"n", "base.n"},
      {"lambda", "base.lambda"},
      {"mu", "base.mu"},
      {"orbifold_k", "base.orbifold_k"},
      {"regime", "regime.kind"},
      {"rho_min", "grid.rho_min"},
      {"rho_max", "grid.rho_max"},
      {"points", "grid.points"},
      {"horizon", "flow.horizon"},
      {"dt", "flow.dt"},
      {"scheme", "flow.scheme"},
      {"bc_kind", "flow.bc_kind"},
      {"order", "analysis.order"},
      {"output", "output_dir"},
  };
  return aliases;
}

ExperimentConfig resolve_config(const ConfigLayers& layers) {
  json file = json::object();
  if (layers.file_text) {
    try {
      file = json::parse(*layers.file_text);
    } catch (const json::parse_error& e) {
      invalid("config", std::string("not valid JSON: ") + e.what());
    }
    if (!file.is_object()) invalid("config", "expected an object");
  }

  std::optional<Preset> preset;
  if (layers.preset) {
    preset = preset_from_string(*layers.preset);
  } else if (file.contains("preset") && !file["preset"].is_null()) {
    if (!file["preset"].is_string()) invalid("config.preset", "expected a string");
    preset = rethrow_as_config("config.preset", [&] { return preset_from_string(file["preset"].get<std::string>()); });
  }
  file.erase("preset");

  json merged = to_json(preset ? preset_config(*preset) : ExperimentConfig{});
  merged.merge_patch(file);
  for (const auto& [raw, text] : layers.flags) {
    std::string key = raw;
    if (auto it = flag_aliases().find(key); it != flag_aliases().end()) key = it->second;
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    set_path(merged, key, std::move(value));
  }
  merged["preset"] = preset ? json(to_string(*preset)) : json(nullptr);
  return from_json(merged);
}

}  // namespace krf
