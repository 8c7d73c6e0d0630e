#include "qmpemba/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <system_error>

#include "qmpemba/errors.hpp"

namespace qmpemba {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(key, "expected a number, got '" + text + "'");
  if (!std::isfinite(v)) fail(key, "value must be finite");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(key, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  fail(key, "expected a boolean, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string body = trim(text);
  if (!body.empty() && body.front() == '[' && body.back() == ']')
    body = body.substr(1, body.size() - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) fail(key, "list must not be empty");
  return out;
}

int to_int(const std::string& key, long long v, long long lo, long long hi) {
  if (v < lo || v > hi)
    fail(key, "value " + std::to_string(v) + " out of range [" + std::to_string(lo) + ", " +
                  std::to_string(hi) + "]");
  return static_cast<int>(v);
}

struct Setter {
  std::string key;
  std::function<void(RunConfig&, const std::string&, bool&)> apply;
};

const std::vector<Setter>& setters() {
  static const std::vector<Setter> table = [] {
    std::vector<Setter> t;
    auto dbl = [&t](const char* key, std::function<double&(RunConfig&)> ref) {
      t.push_back({key, [key, ref](RunConfig& c, const std::string& v, bool&) {
                     ref(c) = parse_double(key, v);
                   }});
    };
    auto integer = [&t](const char* key, std::function<int&(RunConfig&)> ref, long long lo,
                        long long hi) {
      t.push_back({key, [key, ref, lo, hi](RunConfig& c, const std::string& v, bool&) {
                     ref(c) = to_int(key, parse_int(key, v), lo, hi);
                   }});
    };
    t.push_back({"model.n_spins", [](RunConfig& c, const std::string& v, bool& n_set) {
                   c.model.n_spins = to_int("model.n_spins", parse_int("model.n_spins", v), 1, 6);
                   n_set = true;
                 }});
    dbl("model.omega", [](RunConfig& c) -> double& { return c.model.omega; });
    dbl("model.v", [](RunConfig& c) -> double& { return c.model.v; });
    dbl("model.alpha", [](RunConfig& c) -> double& { return c.model.alpha; });
    dbl("model.gamma", [](RunConfig& c) -> double& { return c.model.gamma; });
    dbl("model.epsilon", [](RunConfig& c) -> double& { return c.model.epsilon; });
    t.push_back({"model.boundary", [](RunConfig& c, const std::string& v, bool&) {
                   if (v != "open") fail("model.boundary", "only 'open' is supported");
                   c.model.boundary = Boundary::open;
                 }});
    integer("scan.n_theta", [](RunConfig& c) -> int& { return c.scan.n_theta; }, 1, 100000);
    integer("scan.n_phi", [](RunConfig& c) -> int& { return c.scan.n_phi; }, 1, 100000);
    integer("scan.mode_index", [](RunConfig& c) -> int& { return c.scan.mode_index; }, 0,
            1 << 24);
    dbl("plane.omega_min", [](RunConfig& c) -> double& { return c.plane.omega.min; });
    dbl("plane.omega_max", [](RunConfig& c) -> double& { return c.plane.omega.max; });
    integer("plane.omega_steps", [](RunConfig& c) -> int& { return c.plane.omega.steps; }, 1,
            100000);
    dbl("plane.v_min", [](RunConfig& c) -> double& { return c.plane.v.min; });
    dbl("plane.v_max", [](RunConfig& c) -> double& { return c.plane.v.max; });
    integer("plane.v_steps", [](RunConfig& c) -> int& { return c.plane.v.steps; }, 1, 100000);
    t.push_back({"plane.alpha_list", [](RunConfig& c, const std::string& v, bool&) {
                   c.plane.alpha_list = parse_list("plane.alpha_list", v);
                 }});
    dbl("evolve.t_max_over_tau2", [](RunConfig& c) -> double& { return c.evolve.t_max_over_tau2; });
    integer("evolve.n_samples", [](RunConfig& c) -> int& { return c.evolve.n_samples; }, 2,
            10000000);
    dbl("evolve.window_hi", [](RunConfig& c) -> double& { return c.evolve.window.d_hi; });
    dbl("evolve.window_lo", [](RunConfig& c) -> double& { return c.evolve.window.d_lo; });
    t.push_back({"evolve.mode", [](RunConfig& c, const std::string& v, bool&) {
                   if (v == "identity") c.evolve.mode = EvolveMode::identity;
                   else if (v == "rotated") c.evolve.mode = EvolveMode::rotated;
                   else if (v == "ideal") c.evolve.mode = EvolveMode::ideal;
                   else fail("evolve.mode", "expected identity, rotated or ideal, got '" + v + "'");
                 }});
    dbl("evolve.theta", [](RunConfig& c) -> double& { return c.evolve.theta; });
    dbl("evolve.phi", [](RunConfig& c) -> double& { return c.evolve.phi; });
    t.push_back({"output.directory", [](RunConfig& c, const std::string& v, bool&) {
                   if (v.empty()) fail("output.directory", "must not be empty");
                   c.output.directory = v;
                 }});
    t.push_back({"output.format", [](RunConfig& c, const std::string& v, bool&) {
                   if (v == "csv") c.output.format = OutputFormat::csv;
                   else if (v == "json") c.output.format = OutputFormat::json;
                   else fail("output.format", "expected csv or json, got '" + v + "'");
                 }});
    t.push_back({"output.emit_plot_scripts", [](RunConfig& c, const std::string& v, bool&) {
                   c.output.emit_plot_scripts = parse_bool("output.emit_plot_scripts", v);
                 }});
    t.push_back({"cache.enabled", [](RunConfig& c, const std::string& v, bool&) {
                   c.cache.enabled = parse_bool("cache.enabled", v);
                 }});
    t.push_back({"cache.directory", [](RunConfig& c, const std::string& v, bool&) {
                   if (v.empty()) fail("cache.directory", "must not be empty");
                   c.cache.directory = v;
                 }});
    integer("workers", [](RunConfig& c) -> int& { return c.workers; }, 1, 1024);
    return t;
  }();
  return table;
}

void apply_all(RunConfig& cfg, const KeyValues& kv, bool& n_set) {
  for (const auto& [key, value] : kv) {
    const Setter* match = nullptr;
    for (const auto& s : setters())
      if (s.key == key) match = &s;
    if (!match) throw ConfigError("unknown key '" + key + "'");
    match->apply(cfg, trim(value), n_set);
  }
}

void check_axis(const char* name, const Axis& a) {
  const std::string base = std::string("plane.") + name;
  if (!(a.max >= a.min)) fail(base + "_max", "range is empty (max < min)");
  if (a.steps > 1 && !(a.max > a.min)) fail(base + "_max", "range is empty for steps > 1");
}

void check_writable_dir(const std::string& key, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(key, "cannot create directory '" + dir.string() + "'");
  const fs::path probe = dir / ".qmpemba-write-probe";
  {
    std::ofstream out(probe);
    if (!out) fail(key, "directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

}  // namespace

const char* to_string(EvolveMode m) {
  switch (m) {
    case EvolveMode::identity: return "identity";
    case EvolveMode::rotated: return "rotated";
    case EvolveMode::ideal: return "ideal";
  }
  return "?";
}

const char* to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : setters()) k.push_back(s.key);
    return k;
  }();
  return keys;
}

KeyValues parse_config_text(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key");
    out.emplace_back(std::move(key), trim(std::string_view(body).substr(eq + 1)));
  }
  return out;
}

KeyValues read_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config file '" + path.string() + "' cannot be read");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

KeyValues environment_overrides() {
  KeyValues out;
  if (const char* dir = std::getenv("QMPEMBA_OUTPUT_DIR"); dir && *dir)
    out.emplace_back("output.directory", dir);
  if (const char* w = std::getenv("QMPEMBA_WORKERS"); w && *w) out.emplace_back("workers", w);
  return out;
}

RunConfig build_config(const KeyValues& file, const KeyValues& env, const KeyValues& flags,
                       bool check_output_dir) {
  RunConfig cfg;
  bool n_set = false;
  apply_all(cfg, file, n_set);
  apply_all(cfg, env, n_set);
  apply_all(cfg, flags, n_set);
  if (!n_set) throw ConfigError("n_spins missing");

  const auto& m = cfg.model;
  if (!(m.gamma > 0.0)) fail("model.gamma", "must be > 0");
  if (!(m.epsilon > 0.0)) fail("model.epsilon", "must be > 0");
  if (!(m.alpha >= 0.0)) fail("model.alpha", "must be >= 0");
  check_axis("omega", cfg.plane.omega);
  check_axis("v", cfg.plane.v);
  for (double a : cfg.plane.alpha_list)
    if (!(a >= 0.0)) fail("plane.alpha_list", "entries must be >= 0");
  if (!(cfg.evolve.t_max_over_tau2 > 0.0)) fail("evolve.t_max_over_tau2", "must be > 0");
  if (!(cfg.evolve.window.d_lo > 0.0)) fail("evolve.window_lo", "must be > 0");
  if (!(cfg.evolve.window.d_hi > cfg.evolve.window.d_lo))
    fail("evolve.window_hi", "must exceed evolve.window_lo");

  if (check_output_dir) {
    check_writable_dir("output.directory", cfg.output.directory);
    if (cfg.cache.enabled) check_writable_dir("cache.directory", cfg.cache.directory);
  }
  return cfg;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["model"] = {{"n_spins", c.model.n_spins},   {"omega", c.model.omega},
                {"v", c.model.v},               {"alpha", c.model.alpha},
                {"gamma", c.model.gamma},       {"epsilon", c.model.epsilon},
                {"boundary", "open"}};
  j["scan"] = {{"n_theta", c.scan.n_theta},
               {"n_phi", c.scan.n_phi},
               {"mode_index", c.scan.mode_index}};
  j["plane"] = {{"omega_min", c.plane.omega.min}, {"omega_max", c.plane.omega.max},
                {"omega_steps", c.plane.omega.steps}, {"v_min", c.plane.v.min},
                {"v_max", c.plane.v.max},       {"v_steps", c.plane.v.steps},
                {"alpha_list", c.plane.alpha_list}};
  j["evolve"] = {{"t_max_over_tau2", c.evolve.t_max_over_tau2},
                 {"n_samples", c.evolve.n_samples},
                 {"window_hi", c.evolve.window.d_hi},
                 {"window_lo", c.evolve.window.d_lo},
                 {"mode", to_string(c.evolve.mode)},
                 {"theta", c.evolve.theta},
                 {"phi", c.evolve.phi}};
  j["output"] = {{"directory", c.output.directory.generic_string()},
                 {"format", to_string(c.output.format)},
                 {"emit_plot_scripts", c.output.emit_plot_scripts}};
  j["cache"] = {{"enabled", c.cache.enabled}, {"directory", c.cache.directory.generic_string()}};
  j["workers"] = c.workers;
  return j;
}

}  // namespace qmpemba
