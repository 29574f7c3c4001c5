#include "vpw/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "vpw/errors.hpp"

namespace vpw {

bool operator==(const Scenario& a, const Scenario& b) {
  return a.domain_kind == b.domain_kind && a.kappa == b.kappa && a.data == b.data && a.c_star == b.c_star &&
         a.lambda == b.lambda && a.field == b.field && a.run == b.run && a.z_radius == b.z_radius &&
         a.seed == b.seed && a.out_dir == b.out_dir;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

struct BadValue {
  std::string msg;
};

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_double(const std::string& v) {
  double x;
  auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw BadValue{"expected a number, got '" + v + "'"};
  return x;
}

double to_positive(const std::string& v) {
  double x = to_double(v);
  if (!(x > 0.0)) throw BadValue{"expected a positive number, got '" + v + "'"};
  return x;
}

std::uint64_t to_uint(const std::string& v) {
  std::uint64_t x;
  auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw BadValue{"expected a nonnegative integer, got '" + v + "'"};
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw BadValue{"expected true or false, got '" + v + "'"};
}

Vec3 to_vec(const std::string& v) {
  std::stringstream ss(v);
  std::string part;
  Vec3 out;
  int k = 0;
  while (std::getline(ss, part, ',')) {
    if (k == 3) throw BadValue{"expected three comma-separated numbers"};
    out(k++) = to_double(trim(part));
  }
  if (k != 3) throw BadValue{"expected three comma-separated numbers"};
  return out;
}

std::string vec_str(const Vec3& v) { return fmt(v(0)) + ", " + fmt(v(1)) + ", " + fmt(v(2)); }

std::optional<double> to_auto(const std::string& v) {
  if (v == "auto") return std::nullopt;
  return to_positive(v);
}

std::string auto_str(const std::optional<double>& v) { return v ? fmt(*v) : "auto"; }

struct Entry {
  std::string key;
  std::function<std::string(const Scenario&)> get;
  std::function<void(Scenario&, const std::string&)> set;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {"domain.kind", [](const Scenario& s) { return s.domain_kind; },
       [](Scenario& s, const std::string& v) {
         if (v != "halfspace" && v != "corner" && v != "paraboloid" && v != "hyperboloid")
           throw BadValue{"expected halfspace, corner, paraboloid or hyperboloid"};
         s.domain_kind = v;
       }},
      {"domain.kappa", [](const Scenario& s) { return fmt(s.kappa); },
       [](Scenario& s, const std::string& v) { s.kappa = to_positive(v); }},
      {"data.epsilon", [](const Scenario& s) { return fmt(s.data.epsilon); },
       [](Scenario& s, const std::string& v) {
         s.data.epsilon = to_double(v);
         if (s.data.epsilon < 0.0) throw BadValue{"epsilon must be >= 0"};
       }},
      {"data.center_x", [](const Scenario& s) { return vec_str(s.data.center_x); },
       [](Scenario& s, const std::string& v) { s.data.center_x = to_vec(v); }},
      {"data.center_v", [](const Scenario& s) { return vec_str(s.data.center_v); },
       [](Scenario& s, const std::string& v) { s.data.center_v = to_vec(v); }},
      {"data.rx", [](const Scenario& s) { return fmt(s.data.rx); },
       [](Scenario& s, const std::string& v) { s.data.rx = to_positive(v); }},
      {"data.rv", [](const Scenario& s) { return fmt(s.data.rv); },
       [](Scenario& s, const std::string& v) { s.data.rv = to_positive(v); }},
      {"data.n_markers", [](const Scenario& s) { return std::to_string(s.data.n_markers); },
       [](Scenario& s, const std::string& v) { s.data.n_markers = to_uint(v); }},
      {"data.sampling",
       [](const Scenario& s) { return std::string(s.data.sampling == Sampling::Grid ? "grid" : "low_discrepancy"); },
       [](Scenario& s, const std::string& v) {
         if (v == "grid") s.data.sampling = Sampling::Grid;
         else if (v == "low_discrepancy") s.data.sampling = Sampling::LowDiscrepancy;
         else throw BadValue{"expected grid or low_discrepancy"};
       }},
      {"data.allow_exterior", [](const Scenario& s) { return std::string(s.data.allow_exterior ? "true" : "false"); },
       [](Scenario& s, const std::string& v) { s.data.allow_exterior = to_bool(v); }},
      {"extension.c_star", [](const Scenario& s) { return auto_str(s.c_star); },
       [](Scenario& s, const std::string& v) { s.c_star = to_auto(v); }},
      {"extension.lambda", [](const Scenario& s) { return fmt(s.lambda); },
       [](Scenario& s, const std::string& v) { s.lambda = to_double(v); }},
      {"field.softening", [](const Scenario& s) { return auto_str(s.field.softening); },
       [](Scenario& s, const std::string& v) { s.field.softening = to_auto(v); }},
      {"field.soft_x_factor", [](const Scenario& s) { return fmt(s.field.soft_x_factor); },
       [](Scenario& s, const std::string& v) { s.field.soft_x_factor = to_double(v); }},
      {"field.soft_v_factor", [](const Scenario& s) { return fmt(s.field.soft_v_factor); },
       [](Scenario& s, const std::string& v) { s.field.soft_v_factor = to_double(v); }},
      {"field.probe_rmin", [](const Scenario& s) { return fmt(s.field.probe_rmin); },
       [](Scenario& s, const std::string& v) { s.field.probe_rmin = to_positive(v); }},
      {"field.probe_rmax", [](const Scenario& s) { return fmt(s.field.probe_rmax); },
       [](Scenario& s, const std::string& v) { s.field.probe_rmax = to_positive(v); }},
      {"field.probe_ratio", [](const Scenario& s) { return fmt(s.field.probe_ratio); },
       [](Scenario& s, const std::string& v) {
         s.field.probe_ratio = to_double(v);
         if (!(s.field.probe_ratio > 1.0)) throw BadValue{"probe_ratio must exceed 1"};
       }},
      {"field.probe_dirs", [](const Scenario& s) { return std::to_string(s.field.probe_dirs); },
       [](Scenario& s, const std::string& v) { s.field.probe_dirs = static_cast<int>(to_uint(v)); }},
      {"field.agrid_lo", [](const Scenario& s) { return vec_str(s.field.agrid_lo); },
       [](Scenario& s, const std::string& v) { s.field.agrid_lo = to_vec(v); }},
      {"field.agrid_hi", [](const Scenario& s) { return vec_str(s.field.agrid_hi); },
       [](Scenario& s, const std::string& v) { s.field.agrid_hi = to_vec(v); }},
      {"field.agrid_step", [](const Scenario& s) { return fmt(s.field.agrid_step); },
       [](Scenario& s, const std::string& v) { s.field.agrid_step = to_positive(v); }},
      {"run.t_end", [](const Scenario& s) { return fmt(s.run.t_end); },
       [](Scenario& s, const std::string& v) {
         s.run.t_end = to_double(v);
         if (s.run.t_end < 0.0) throw BadValue{"t_end must be >= 0"};
       }},
      {"run.dt0", [](const Scenario& s) { return fmt(s.run.dt0); },
       [](Scenario& s, const std::string& v) { s.run.dt0 = to_positive(v); }},
      {"run.dt_growth", [](const Scenario& s) { return fmt(s.run.dt_growth); },
       [](Scenario& s, const std::string& v) {
         s.run.dt_growth = to_double(v);
         if (s.run.dt_growth < 0.0) throw BadValue{"dt_growth must be >= 0"};
       }},
      {"run.dt_max", [](const Scenario& s) { return fmt(s.run.dt_max); },
       [](Scenario& s, const std::string& v) { s.run.dt_max = to_positive(v); }},
      {"run.mode",
       [](const Scenario& s) { return std::string(s.run.mode == BoundaryMode::Extended ? "extended" : "absorbing"); },
       [](Scenario& s, const std::string& v) {
         if (v == "extended") s.run.mode = BoundaryMode::Extended;
         else if (v == "absorbing") s.run.mode = BoundaryMode::Absorbing;
         else throw BadValue{"expected extended or absorbing"};
       }},
      {"run.tangent_maps", [](const Scenario& s) { return std::string(s.run.tangent_maps ? "true" : "false"); },
       [](Scenario& s, const std::string& v) { s.run.tangent_maps = to_bool(v); }},
      {"run.checkpoints", [](const Scenario& s) { return fmt(s.run.checkpoint_t0); },
       [](Scenario& s, const std::string& v) { s.run.checkpoint_t0 = to_positive(v); }},
      {"run.series_per_octave", [](const Scenario& s) { return std::to_string(s.run.series_per_octave); },
       [](Scenario& s, const std::string& v) {
         s.run.series_per_octave = static_cast<int>(to_uint(v));
         if (s.run.series_per_octave < 1) throw BadValue{"series_per_octave must be >= 1"};
       }},
      {"run.seed", [](const Scenario& s) { return std::to_string(s.seed); },
       [](Scenario& s, const std::string& v) { s.seed = to_uint(v); }},
      {"run.out_dir", [](const Scenario& s) { return s.out_dir; },
       [](Scenario& s, const std::string& v) { s.out_dir = v; }},
      {"asymptotics.z_radius", [](const Scenario& s) { return fmt(s.z_radius); },
       [](Scenario& s, const std::string& v) { s.z_radius = to_positive(v); }},
  };
  return e;
}

}  // namespace

const std::vector<std::string>& schema_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  std::stringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw SchemaError(line, lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw SchemaError(line, lineno, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
    const Entry* hit = nullptr;
    for (const auto& e : entries())
      if (e.key == key) hit = &e;
    if (!hit) {
      std::string best;
      std::size_t bd = std::string::npos;
      for (const auto& e : entries()) {
        std::size_t d = levenshtein(key, e.key);
        if (d < bd) bd = d, best = e.key;
      }
      throw SchemaError(key, lineno, "unknown key; did you mean '" + best + "'?");
    }
    try {
      hit->set(s, value);
    } catch (const BadValue& b) {
      throw SchemaError(key, lineno, b.msg);
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

std::string render_scenario(const Scenario& s) {
  std::string out, section;
  for (const auto& e : entries()) {
    std::string sec = e.key.substr(0, e.key.find('.'));
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += e.key.substr(e.key.find('.') + 1) + " = " + e.get(s) + "\n";
  }
  return out;
}

}  // namespace vpw
