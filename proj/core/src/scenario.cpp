#include "kinslab/scenario.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kinslab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Entry {
  std::string value;
  bool used = false;
};

class Document {
 public:
  explicit Document(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          fail(lineno, "malformed section header '" + line + "'");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) fail(lineno, "expected key = value, got '" + line + "'");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty()) fail(lineno, "empty key or value");
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        value = value.substr(1, value.size() - 2);
      entries_[section + "." + key] = Entry{value, false};
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  double number(const std::string& key, double fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second.value, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("scenario: key '" + key + "' is not a number");
    }
    if (pos != it->second.value.size())
      throw std::invalid_argument("scenario: key '" + key + "' is not a number");
    return v;
  }

  long integer(const std::string& key, long fallback) {
    const double v = number(key, static_cast<double>(fallback));
    const long n = static_cast<long>(v);
    if (static_cast<double>(n) != v)
      throw std::invalid_argument("scenario: key '" + key + "' must be an integer");
    return n;
  }

  bool boolean(const std::string& key, bool fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    if (it->second.value == "true") return true;
    if (it->second.value == "false") return false;
    throw std::invalid_argument("scenario: key '" + key + "' must be true or false");
  }

  std::string text(const std::string& key, const std::string& fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    return it->second.value;
  }

  void reject_unknown() const {
    std::string unknown;
    for (const auto& [key, entry] : entries_)
      if (!entry.used) unknown += (unknown.empty() ? "" : ", ") + key;
    if (!unknown.empty())
      throw std::invalid_argument("scenario: unknown keys: " + unknown);
  }

 private:
  [[noreturn]] static void fail(int lineno, const std::string& what) {
    std::ostringstream msg;
    msg << "scenario: line " << lineno << ": " << what;
    throw std::invalid_argument(msg.str());
  }

  std::map<std::string, Entry> entries_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("scenario: " + message);
}

WallConfig parse_wall(Document& doc, const std::string& section) {
  WallConfig w;
  w.theta = doc.number(section + ".theta", 1.0);
  require(w.theta > 0.0, section + ".theta must be > 0");

  const std::string kind = doc.text(section + ".kind", "specular");
  if (kind == "specular")
    w.kind = LocalReflectKind::specular;
  else if (kind == "inverse")
    w.kind = LocalReflectKind::inverse;
  else
    require(false, section + ".kind must be specular or inverse");

  const std::string law = doc.text(section + ".law", "constant");
  if (law == "constant") {
    const double alpha = doc.number(section + ".alpha", 1.0);
    require(alpha > 0.0 && alpha <= 1.0, section + ".alpha must lie in (0,1]");
    w.law = AccommodationLaw::constant(alpha);
  } else if (law == "flux_dependent") {
    const double alpha_bar = doc.number(section + ".alpha_bar", 1.0);
    const double c = doc.number(section + ".c", 0.0);
    require(alpha_bar > 0.0 && alpha_bar <= 1.0,
            section + ".alpha_bar must lie in (0,1]");
    require(c >= 0.0, section + ".c must be >= 0");
    w.law = AccommodationLaw::flux_dependent(alpha_bar, c);
  } else {
    require(false, section + ".law must be constant or flux_dependent");
  }
  return w;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Document doc(text);
  Scenario s;

  s.lx = doc.number("grid.lx", 1.0);
  s.nx = static_cast<int>(doc.integer("grid.nx", 64));
  s.v_max = doc.number("grid.v_max", 8.0);
  s.nv = static_cast<int>(doc.integer("grid.nv", 128));
  require(s.lx > 0.0, "grid.lx must be > 0");
  require(s.nx >= 2, "grid.nx must be >= 2");
  require(s.v_max > 0.0, "grid.v_max must be > 0");
  require(s.nv >= 4 && s.nv % 2 == 0, "grid.nv must be even and >= 4");

  s.left = parse_wall(doc, "walls.left");
  s.right = parse_wall(doc, "walls.right");

  s.model.nu = doc.number("model.nu", 0.0);
  s.model.lambda = doc.number("model.lambda", 0.0);
  s.model.poisson = doc.boolean("model.poisson", false);
  s.model.bgk = doc.boolean("model.bgk", false);
  s.model.tau = doc.number("model.tau", 1.0);
  s.model.theta_ref = doc.number("model.theta_ref", 1.0);
  require(s.model.nu >= 0.0, "model.nu must be >= 0");
  require(!s.model.bgk || s.model.tau > 0.0, "model.tau must be > 0 when bgk = true");
  require(s.model.theta_ref > 0.0, "model.theta_ref must be > 0");

  const std::string preset = doc.text("run.preset", "maxwellian");
  if (preset == "maxwellian")
    s.ic.preset = InitialCondition::Preset::maxwellian;
  else if (preset == "two_bump")
    s.ic.preset = InitialCondition::Preset::two_bump;
  else if (preset == "uniform_box")
    s.ic.preset = InitialCondition::Preset::uniform_box;
  else
    require(false, "run.preset must be maxwellian, two_bump or uniform_box");
  s.ic.rho0 = doc.number("run.rho0", 1.0);
  s.ic.u0 = doc.number("run.u0", 0.0);
  s.ic.temperature = doc.number("run.temperature", 1.0);
  s.ic.xmod_amp = doc.number("run.xmod_amp", 0.0);
  s.ic.box_x0 = doc.number("run.box_x0", 0.25);
  s.ic.box_x1 = doc.number("run.box_x1", 0.75);
  s.ic.box_w = doc.number("run.box_w", 1.0);
  s.ic.box_value = doc.number("run.box_value", 1.0);
  require(s.ic.rho0 > 0.0, "run.rho0 must be > 0");
  require(s.ic.temperature > 0.0, "run.temperature must be > 0");
  require(s.ic.xmod_amp >= 0.0 && s.ic.xmod_amp < 1.0,
          "run.xmod_amp must lie in [0,1)");
  require(s.ic.box_x1 > s.ic.box_x0, "run.box_x1 must exceed run.box_x0");
  require(s.ic.box_w > 0.0, "run.box_w must be > 0");
  require(s.ic.box_value >= 0.0, "run.box_value must be >= 0");

  s.t_final = doc.number("run.t_final", 0.0);
  require(s.t_final > 0.0, "run.t_final is required and must be > 0");
  s.dt = doc.number("run.dt", 0.0);
  require(s.dt >= 0.0, "run.dt must be >= 0 (0 selects auto-CFL)");
  s.cfl_factor = doc.number("run.cfl_factor", 0.9);
  require(s.cfl_factor > 0.0 && s.cfl_factor <= 1.0,
          "run.cfl_factor must lie in (0,1]");
  const long seed = doc.integer("run.seed", 0);
  require(seed >= 0, "run.seed must be >= 0");
  s.seed = static_cast<unsigned long>(seed);
  s.out = doc.text("run.out", "out");

  doc.reject_unknown();
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "[grid]\n";
  os << "lx = " << fmt(s.lx) << "\n";
  os << "nx = " << s.nx << "\n";
  os << "v_max = " << fmt(s.v_max) << "\n";
  os << "nv = " << s.nv << "\n";
  for (const auto& [name, w] :
       {std::pair<const char*, const WallConfig*>{"left", &s.left},
        std::pair<const char*, const WallConfig*>{"right", &s.right}}) {
    os << "\n[walls." << name << "]\n";
    os << "theta = " << fmt(w->theta) << "\n";
    os << "kind = \""
       << (w->kind == LocalReflectKind::specular ? "specular" : "inverse")
       << "\"\n";
    if (w->law.kind == AccommodationLaw::Kind::constant) {
      os << "law = \"constant\"\n";
      os << "alpha = " << fmt(w->law.alpha) << "\n";
    } else {
      os << "law = \"flux_dependent\"\n";
      os << "alpha_bar = " << fmt(w->law.alpha) << "\n";
      os << "c = " << fmt(w->law.decay) << "\n";
    }
  }
  os << "\n[model]\n";
  os << "nu = " << fmt(s.model.nu) << "\n";
  os << "lambda = " << fmt(s.model.lambda) << "\n";
  os << "poisson = " << (s.model.poisson ? "true" : "false") << "\n";
  os << "bgk = " << (s.model.bgk ? "true" : "false") << "\n";
  os << "tau = " << fmt(s.model.tau) << "\n";
  os << "theta_ref = " << fmt(s.model.theta_ref) << "\n";
  os << "\n[run]\n";
  const char* preset = "maxwellian";
  if (s.ic.preset == InitialCondition::Preset::two_bump) preset = "two_bump";
  if (s.ic.preset == InitialCondition::Preset::uniform_box) preset = "uniform_box";
  os << "preset = \"" << preset << "\"\n";
  os << "rho0 = " << fmt(s.ic.rho0) << "\n";
  os << "u0 = " << fmt(s.ic.u0) << "\n";
  os << "temperature = " << fmt(s.ic.temperature) << "\n";
  os << "xmod_amp = " << fmt(s.ic.xmod_amp) << "\n";
  os << "box_x0 = " << fmt(s.ic.box_x0) << "\n";
  os << "box_x1 = " << fmt(s.ic.box_x1) << "\n";
  os << "box_w = " << fmt(s.ic.box_w) << "\n";
  os << "box_value = " << fmt(s.ic.box_value) << "\n";
  os << "t_final = " << fmt(s.t_final) << "\n";
  os << "dt = " << fmt(s.dt) << "\n";
  os << "cfl_factor = " << fmt(s.cfl_factor) << "\n";
  os << "seed = " << s.seed << "\n";
  os << "out = \"" << s.out << "\"\n";
  return os.str();
}

}  // namespace kinslab
