#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>

#include "catchup/estimate.hpp"
#include "json.hpp"

namespace catchup::cli {

using json = nlohmann::json;

namespace {

// Walks one JSON object, checking types and rejecting keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + path_ + key + "'");
    }
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError("'" + path_ + key + "' must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError("'" + path_ + key + "' must be finite");
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) throw ConfigError("'" + path_ + key + "' must be an integer");
      out = v->get<int>();
    }
  }

  void unsigned_integer(const std::string& key, std::uint64_t& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned()) throw ConfigError("'" + path_ + key + "' must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError("'" + path_ + key + "' must be true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError("'" + path_ + key + "' must be a string");
      out = v->get<std::string>();
    }
  }

  template <typename Fn>
  void object(const std::string& key, Fn fn) {
    if (const json* v = get(key)) {
      Section s(*v, path_ + key + ".");
      fn(s);
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config " : "'" + path_.substr(0, path_.size() - 1) + "' "; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> number_array(const json& v, const std::string& key, std::size_t n) {
  if (!v.is_array() || v.size() != n) throw ConfigError("'" + key + "' must be an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("'" + key + "' must be an array of " + std::to_string(n) + " numbers");
    out.push_back(e.get<double>());
    if (!std::isfinite(out.back())) throw ConfigError("'" + key + "' entries must be finite");
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  try {
    macro.validate();
    scenario_base().validate();
    estimate::parse_ranges(estimate.exclude);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(strictness > 0.0)) throw ConfigError("solver.strictness must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("solver.tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("solver.max_iterations must be at least 1");
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

synthesis::SynthesisOptions RunConfig::synthesis_options() const {
  synthesis::SynthesisOptions o;
  o.strictness = strictness;
  o.loop_strictness = std::max(o.loop_strictness, 10.0 * strictness);
  o.solver.strictness = strictness;
  o.tolerance = tolerance;
  o.max_iterations = max_iterations;
  o.refine_multipliers = refine_multipliers;
  return o;
}

scenario::ScenarioSpec RunConfig::scenario_base() const {
  scenario::ScenarioSpec s;
  s.start_year = start_year;
  s.horizon = horizon;
  s.election_anchor = election_anchor;
  s.xi0_star = xi0_star;
  s.d0_debt = d0_debt;
  s.x0 = x0;
  s.realization = realization;
  s.seed = seed;
  return s;
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  {
    Section root(j, "");
    root.object("macro", [&](Section& s) {
      auto& m = c.macro;
      s.number("alpha1", m.alpha1);
      s.number("alpha2", m.alpha2);
      s.number("beta1", m.beta1);
      s.number("beta2", m.beta2);
      s.number("gamma1", m.gamma1);
      s.number("gamma2", m.gamma2);
      s.number("rho1", m.rho1);
      s.number("rho2", m.rho2);
      if (const json* d = s.get("delta")) {
        const auto v = number_array(*d, "macro.delta", 4);
        for (std::size_t k = 0; k < 4; ++k) m.delta[k] = v[k];
      }
      s.number("pi_star", m.pi_star);
      s.number("i_star", m.i_star);
    });
    if (const json* x = root.get("x0")) {
      const auto v = number_array(*x, "x0", 2);
      c.x0 = {v[0], v[1]};
    }
    root.object("scenario", [&](Section& s) {
      s.number("d0_debt", c.d0_debt);
      s.number("xi0_star", c.xi0_star);
      s.integer("horizon", c.horizon);
      s.integer("start_year", c.start_year);
      s.integer("election_anchor", c.election_anchor);
    });
    root.object("uncertainty", [&](Section& s) {
      std::string kind = uncertainty::to_string(c.realization);
      s.string("realization", kind);
      try {
        c.realization = uncertainty::parse_realization(kind);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("uncertainty.realization: " + std::string(e.what()));
      }
      s.unsigned_integer("seed", c.seed);
    });
    root.object("solver", [&](Section& s) {
      s.number("strictness", c.strictness);
      s.number("tolerance", c.tolerance);
      s.integer("max_iterations", c.max_iterations);
      s.boolean("refine_multipliers", c.refine_multipliers);
    });
    root.object("estimate", [&](Section& s) {
      s.string("exclude", c.estimate.exclude);
      s.boolean("intercept", c.estimate.intercept);
      s.object("columns", [&](Section& cs) {
        cs.string("z", c.estimate.z_column);
        cs.string("i", c.estimate.i_column);
        cs.string("pi", c.estimate.pi_column);
        cs.string("g", c.estimate.g_column);
      });
    });
    root.object("output", [&](Section& s) {
      s.string("dir", c.output_dir);
      s.boolean("svg", c.svg);
    });
    if (const json* g = root.get("game")) {
      if (g->is_string()) {
        c.game_file = g->get<std::string>();
      } else if (!g->is_null()) {
        throw ConfigError("'game' must be a path or null");
      }
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c, int indent) {
  const auto& m = c.macro;
  json j;
  j["macro"] = {{"alpha1", m.alpha1}, {"alpha2", m.alpha2}, {"beta1", m.beta1},     {"beta2", m.beta2},
                {"gamma1", m.gamma1}, {"gamma2", m.gamma2}, {"rho1", m.rho1},       {"rho2", m.rho2},
                {"delta", m.delta},   {"pi_star", m.pi_star}, {"i_star", m.i_star}};
  j["x0"] = {c.x0.z, c.x0.pi_tilde};
  j["scenario"] = {{"d0_debt", c.d0_debt},
                   {"xi0_star", c.xi0_star},
                   {"horizon", c.horizon},
                   {"start_year", c.start_year},
                   {"election_anchor", c.election_anchor}};
  j["uncertainty"] = {{"realization", uncertainty::to_string(c.realization)}, {"seed", c.seed}};
  j["solver"] = {{"strictness", c.strictness},
                 {"tolerance", c.tolerance},
                 {"max_iterations", c.max_iterations},
                 {"refine_multipliers", c.refine_multipliers}};
  j["estimate"] = {{"exclude", c.estimate.exclude},
                   {"intercept", c.estimate.intercept},
                   {"columns",
                    {{"z", c.estimate.z_column},
                     {"i", c.estimate.i_column},
                     {"pi", c.estimate.pi_column},
                     {"g", c.estimate.g_column}}}};
  j["output"] = {{"dir", c.output_dir}, {"svg", c.svg}};
  j["game"] = c.game_file ? json(*c.game_file) : json(nullptr);
  return j.dump(indent);
}

std::string config_hash(const RunConfig& c) {
  // Where the files go does not change what is in them.
  RunConfig k = c;
  k.output_dir = "out";
  k.svg = true;
  const std::string text = config_to_json(k, -1);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace catchup::cli
