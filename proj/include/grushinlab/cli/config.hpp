#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace grushinlab::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "verify-closed-forms", "audit-ellipticity",  "solve",       "boundary-growth", "holder-modulus",
      "oscillation-decay",   "supersolution-scan", "decay-fit",   "global-bound"};
  return names;
}

struct FieldConfig {
  /// "identity" or "decaying-perturbation".
  std::string family = "identity";
  double s = 2.0;
  double amplitude = 0.3;
  std::uint64_t seed = 1;
};

/// Empty vectors mean "use the command's default box".
struct GridConfig {
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  std::vector<std::size_t> counts;
  /// <= 0 selects 1+alpha.
  double grading = -1.0;
};

struct Tolerances {
  double solver = 1e-10;
  long max_iter = 5000;
  /// Normalized residual allowed in verify-closed-forms.
  double identity = 1e-9;
  /// Half-width of the accepted band around the expected exponent, relative.
  double exponent_band = 0.05;
  /// Same for the decay slope.
  double slope_band = 0.15;
  /// Largest accepted relative change of the Hölder quotient between the two finest levels.
  double holder_stability = 0.25;
};

/// Command-specific knobs; each command reads the ones it needs.
struct ExperimentConfig {
  std::size_t points = 1000;
  double gauge_min = 0.01;
  double gauge_max = 100.0;
  double epsilon0 = 0.5;
  /// "w-trace", "normal-coordinate", "zero" or "constant".
  std::string bc = "w-trace";
  double bc_constant = 0.5;
  /// <= 0 selects 1/(1+alpha).
  double exponent = -1.0;
  std::size_t levels = 3;
  std::size_t pairs = 100000;
  std::vector<double> radii = {1.0, 4.0, 16.0};
  double rho = 0.5;
  double s = 2.0;
  double amplitude = 1.0;
  double first_shell = 1.0;
  std::size_t shell_count = 11;
  std::size_t samples_per_shell = 2000;
  /// Unset: 1 and 32 for decay-fit, 2 and 64 for global-bound.
  std::optional<double> inner_radius;
  std::optional<double> outer_radius;
  std::size_t tangential_count = 401;
  std::size_t normal_count = 201;
  double core_factor = 0.2;
  double C_scale = 1.0;
  double oracle_C0 = 0.0;
  double R0 = 1.0;
};

struct RunConfig {
  std::string command;
  int n = 2;
  double alpha = 1.0;
  FieldConfig field;
  GridConfig grid;
  Tolerances tolerances;
  ExperimentConfig experiment;
  std::uint64_t seed = 1;
  std::string output_dir = "grushinlab-out";
};

/// Values given on the command line; unset members leave the file value alone.
struct FlagOverrides {
  std::optional<std::string> command;
  std::optional<int> n;
  std::optional<double> alpha;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

namespace detail {

using nlohmann::json;

inline std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
}

inline void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(join_path(path, it.key()) + ": unknown key");
  }
}

inline double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  return v.get<double>();
}

inline long long get_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v.get<long long>();
}

inline std::size_t get_count(const json& v, const std::string& path) {
  const long long c = get_integer(v, path);
  if (c < 0) throw ConfigError(path + ": must be >= 0");
  return static_cast<std::size_t>(c);
}

inline std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + ": expected a string");
  return v.get<std::string>();
}

inline std::vector<double> get_number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<std::size_t> get_count_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_count(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Small visitor so each section lists its keys exactly once.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) { require_object(j_, path_); }
  /// Call after every key has been visited; rejects the rest.
  void done() const { reject_unknown(j_, path_, seen_); }

  template <typename Fn>
  void field(const std::string& key, Fn&& fn) {
    seen_.insert(key);
    if (j_.contains(key)) fn(j_.at(key), join_path(path_, key));
  }
  void number(const std::string& key, double& out) {
    field(key, [&](const json& v, const std::string& p) { out = get_number(v, p); });
  }
  void number(const std::string& key, std::optional<double>& out) {
    field(key, [&](const json& v, const std::string& p) { out = get_number(v, p); });
  }
  void count(const std::string& key, std::size_t& out) {
    field(key, [&](const json& v, const std::string& p) { out = get_count(v, p); });
  }
  void text(const std::string& key, std::string& out) {
    field(key, [&](const json& v, const std::string& p) { out = get_string(v, p); });
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

/// Fills cfg from a JSON document; keys not present keep their current value.
inline void merge_json(RunConfig& cfg, const nlohmann::json& root) {
  using detail::json;
  detail::Section top(root, "");
  top.text("command", cfg.command);
  top.field("params", [&](const json& v, const std::string& path) {
    detail::Section s(v, path);
    s.field("n", [&](const json& x, const std::string& p) { cfg.n = static_cast<int>(detail::get_integer(x, p)); });
    s.number("alpha", cfg.alpha);
    s.done();
  });
  top.field("field", [&](const json& v, const std::string& path) {
    detail::Section s(v, path);
    s.text("family", cfg.field.family);
    s.number("s", cfg.field.s);
    s.number("amplitude", cfg.field.amplitude);
    s.field("seed", [&](const json& x, const std::string& p) {
      cfg.field.seed = static_cast<std::uint64_t>(detail::get_count(x, p));
    });
    s.done();
  });
  top.field("grid", [&](const json& v, const std::string& path) {
    detail::Section s(v, path);
    s.field("box_lo", [&](const json& x, const std::string& p) { cfg.grid.box_lo = detail::get_number_list(x, p); });
    s.field("box_hi", [&](const json& x, const std::string& p) { cfg.grid.box_hi = detail::get_number_list(x, p); });
    s.field("counts", [&](const json& x, const std::string& p) { cfg.grid.counts = detail::get_count_list(x, p); });
    s.number("grading", cfg.grid.grading);
    s.done();
  });
  top.field("tolerances", [&](const json& v, const std::string& path) {
    detail::Section s(v, path);
    s.number("solver", cfg.tolerances.solver);
    s.field("max_iter", [&](const json& x, const std::string& p) {
      cfg.tolerances.max_iter = static_cast<long>(detail::get_integer(x, p));
    });
    s.number("identity", cfg.tolerances.identity);
    s.number("exponent_band", cfg.tolerances.exponent_band);
    s.number("slope_band", cfg.tolerances.slope_band);
    s.number("holder_stability", cfg.tolerances.holder_stability);
    s.done();
  });
  top.field("experiment", [&](const json& v, const std::string& path) {
    auto& e = cfg.experiment;
    detail::Section s(v, path);
    s.count("points", e.points);
    s.number("gauge_min", e.gauge_min);
    s.number("gauge_max", e.gauge_max);
    s.number("epsilon0", e.epsilon0);
    s.text("bc", e.bc);
    s.number("bc_constant", e.bc_constant);
    s.number("exponent", e.exponent);
    s.count("levels", e.levels);
    s.count("pairs", e.pairs);
    s.field("radii", [&](const json& x, const std::string& p) { e.radii = detail::get_number_list(x, p); });
    s.number("rho", e.rho);
    s.number("s", e.s);
    s.number("amplitude", e.amplitude);
    s.number("first_shell", e.first_shell);
    s.count("shell_count", e.shell_count);
    s.count("samples_per_shell", e.samples_per_shell);
    s.number("inner_radius", e.inner_radius);
    s.number("outer_radius", e.outer_radius);
    s.count("tangential_count", e.tangential_count);
    s.count("normal_count", e.normal_count);
    s.number("core_factor", e.core_factor);
    s.number("C_scale", e.C_scale);
    s.number("oracle_C0", e.oracle_C0);
    s.number("R0", e.R0);
    s.done();
  });
  top.field("seed", [&](const json& x, const std::string& p) {
    cfg.seed = static_cast<std::uint64_t>(detail::get_count(x, p));
  });
  top.text("output_dir", cfg.output_dir);
  top.done();
}

inline void apply_overrides(RunConfig& cfg, const FlagOverrides& f) {
  if (f.command) cfg.command = *f.command;
  if (f.n) cfg.n = *f.n;
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.output_dir) cfg.output_dir = *f.output_dir;
  if (f.seed) cfg.seed = *f.seed;
  if (f.tol) cfg.tolerances.solver = *f.tol;
}

/// Inner and outer gauge radii of the exterior domain after command defaults.
inline std::pair<double, double> exterior_radii(const RunConfig& c) {
  const bool global = c.command == "global-bound";
  return {c.experiment.inner_radius.value_or(global ? 2.0 : 1.0), c.experiment.outer_radius.value_or(global ? 64.0 : 32.0)};
}

/// Throws ConfigError naming the first offending field.
inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); };
  const auto& names = command_names();
  if (c.command.empty()) fail("command", "missing");
  if (std::find(names.begin(), names.end(), c.command) == names.end()) fail("command", "unknown command '" + c.command + "'");
  if (c.n < 2) fail("params.n", "must be >= 2");
  if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) fail("params.alpha", "must be \xE2\x89\xA5 0");

  if (c.field.family != "identity" && c.field.family != "decaying-perturbation") {
    fail("field.family", "must be 'identity' or 'decaying-perturbation'");
  }
  if (c.field.family == "decaying-perturbation") {
    if (!(c.field.s > 0.0)) fail("field.s", "must be > 0");
    if (!(c.field.amplitude > 0.0 && c.field.amplitude <= 1.0)) fail("field.amplitude", "must lie in (0, 1]");
  }

  const bool has_grid = !c.grid.box_lo.empty() || !c.grid.box_hi.empty() || !c.grid.counts.empty();
  if (has_grid) {
    const auto n = static_cast<std::size_t>(c.n);
    if (c.grid.box_lo.size() != n) fail("grid.box_lo", "must have n entries");
    if (c.grid.box_hi.size() != n) fail("grid.box_hi", "must have n entries");
    if (c.grid.counts.size() != n) fail("grid.counts", "must have n entries");
    for (std::size_t k = 0; k < n; ++k) {
      if (!(c.grid.box_hi[k] > c.grid.box_lo[k])) fail("grid.box_hi[" + std::to_string(k) + "]", "must exceed box_lo");
      if (c.grid.counts[k] < 3) fail("grid.counts[" + std::to_string(k) + "]", "must be >= 3");
    }
    if (c.grid.box_lo.back() != 0.0) fail("grid.box_lo[" + std::to_string(n - 1) + "]", "normal range must start at 0");
  }

  const auto& t = c.tolerances;
  if (!(t.solver > 0.0)) fail("tolerances.solver", "must be > 0");
  if (t.max_iter < 1) fail("tolerances.max_iter", "must be >= 1");
  if (!(t.identity > 0.0)) fail("tolerances.identity", "must be > 0");
  if (!(t.exponent_band > 0.0)) fail("tolerances.exponent_band", "must be > 0");
  if (!(t.slope_band > 0.0)) fail("tolerances.slope_band", "must be > 0");
  if (!(t.holder_stability > 0.0)) fail("tolerances.holder_stability", "must be > 0");

  const auto& e = c.experiment;
  const std::string& cmd = c.command;
  if (cmd == "verify-closed-forms") {
    if (e.points < 1) fail("experiment.points", "must be >= 1");
    if (!(e.gauge_min > 0.0)) fail("experiment.gauge_min", "must be > 0");
    if (!(e.gauge_max >= e.gauge_min)) fail("experiment.gauge_max", "must be >= gauge_min");
  }
  if (cmd == "audit-ellipticity") {
    if (e.points < 1) fail("experiment.points", "must be >= 1");
    if (!(e.epsilon0 > 0.0 && e.epsilon0 < 1.0)) fail("experiment.epsilon0", "must lie in (0, 1)");
  }
  if (cmd == "solve" || cmd == "boundary-growth") {
    static const std::set<std::string> bcs = {"w-trace", "normal-coordinate", "zero", "constant"};
    if (!bcs.count(e.bc)) fail("experiment.bc", "must be one of w-trace, normal-coordinate, zero, constant");
    if (std::abs(e.bc_constant) > 1.0) fail("experiment.bc_constant", "must satisfy |value| <= 1");
  }
  if (cmd == "holder-modulus") {
    if (e.levels < 2) fail("experiment.levels", "must be >= 2");
    if (e.pairs < 1) fail("experiment.pairs", "must be >= 1");
    if (e.exponent > 1.0) fail("experiment.exponent", "must be <= 1");
  }
  if (cmd == "oscillation-decay") {
    if (e.radii.empty()) fail("experiment.radii", "must be nonempty");
    for (std::size_t i = 0; i < e.radii.size(); ++i) {
      if (!(e.radii[i] > 0.0)) fail("experiment.radii[" + std::to_string(i) + "]", "must be > 0");
    }
  }
  if (cmd == "supersolution-scan") {
    if (!(e.s > 0.0)) fail("experiment.s", "must be > 0");
    const double cap = std::min(e.s / (c.n - 1), 1.0);
    if (!(e.rho > 0.0 && e.rho < cap)) {
      std::ostringstream os;
      os << "must lie in (0, min{s/(n-1), 1}) = (0, " << cap
         << "), the range in which w - w^{1+rho} is a supersolution far out";
      fail("experiment.rho", os.str());
    }
    if (!(e.amplitude >= 0.0 && e.amplitude <= 1.0)) fail("experiment.amplitude", "must lie in [0, 1]");
    if (!(e.first_shell > 0.0)) fail("experiment.first_shell", "must be > 0");
    if (e.shell_count < 1) fail("experiment.shell_count", "must be >= 1");
    if (e.samples_per_shell < 1) fail("experiment.samples_per_shell", "must be >= 1");
  }
  if (cmd == "decay-fit" || cmd == "global-bound") {
    const auto [inner, outer] = exterior_radii(c);
    if (!(inner > 0.0)) fail("experiment.inner_radius", "must be > 0");
    if (!(outer > 2.0 * inner)) fail("experiment.outer_radius", "must exceed 2 * inner_radius");
    if (e.tangential_count < 3) fail("experiment.tangential_count", "must be >= 3");
    if (e.normal_count < 3) fail("experiment.normal_count", "must be >= 3");
    if (!(e.core_factor > 0.0)) fail("experiment.core_factor", "must be > 0");
  }
  if (cmd == "global-bound") {
    if (!(e.rho > 0.0)) fail("experiment.rho", "must be > 0");
    if (!(e.C_scale > 0.0)) fail("experiment.C_scale", "must be > 0");
    if (!(e.oracle_C0 >= 0.0)) fail("experiment.oracle_C0", "must be >= 0");
    if (!(e.R0 > 0.0)) fail("experiment.R0", "must be > 0");
    if (exterior_radii(c).first < e.R0) fail("experiment.inner_radius", "must be >= R0");
  }
  if (c.output_dir.empty()) fail("output_dir", "must be nonempty");
}

/// Effective configuration: defaults, then the file (if any), then flags.
inline RunConfig parse_config(const std::optional<std::string>& file, const FlagOverrides& flags) {
  RunConfig cfg;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError(*file + ": cannot open");
    nlohmann::json root;
    try {
      root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(*file + ": " + e.what());
    }
    merge_json(cfg, root);
  }
  apply_overrides(cfg, flags);
  validate(cfg);
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text, const FlagOverrides& flags = {}) {
  RunConfig cfg;
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  merge_json(cfg, root);
  apply_overrides(cfg, flags);
  validate(cfg);
  return cfg;
}

inline nlohmann::json to_json(const RunConfig& c) {
  const auto& e = c.experiment;
  return {{"command", c.command},
          {"params", {{"n", c.n}, {"alpha", c.alpha}}},
          {"field", {{"family", c.field.family}, {"s", c.field.s}, {"amplitude", c.field.amplitude}, {"seed", c.field.seed}}},
          {"grid", {{"box_lo", c.grid.box_lo}, {"box_hi", c.grid.box_hi}, {"counts", c.grid.counts}, {"grading", c.grid.grading}}},
          {"tolerances",
           {{"solver", c.tolerances.solver},
            {"max_iter", c.tolerances.max_iter},
            {"identity", c.tolerances.identity},
            {"exponent_band", c.tolerances.exponent_band},
            {"slope_band", c.tolerances.slope_band},
            {"holder_stability", c.tolerances.holder_stability}}},
          {"experiment",
           {{"points", e.points},
            {"gauge_min", e.gauge_min},
            {"gauge_max", e.gauge_max},
            {"epsilon0", e.epsilon0},
            {"bc", e.bc},
            {"bc_constant", e.bc_constant},
            {"exponent", e.exponent},
            {"levels", e.levels},
            {"pairs", e.pairs},
            {"radii", e.radii},
            {"rho", e.rho},
            {"s", e.s},
            {"amplitude", e.amplitude},
            {"first_shell", e.first_shell},
            {"shell_count", e.shell_count},
            {"samples_per_shell", e.samples_per_shell},
            {"inner_radius", exterior_radii(c).first},
            {"outer_radius", exterior_radii(c).second},
            {"tangential_count", e.tangential_count},
            {"normal_count", e.normal_count},
            {"core_factor", e.core_factor},
            {"C_scale", e.C_scale},
            {"oracle_C0", e.oracle_C0},
            {"R0", e.R0}}},
          {"seed", c.seed},
          {"output_dir", c.output_dir}};
}

}  // namespace grushinlab::cli
