#include "unisac/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace unisac {

void SystemConfig::validate() const {
  std::vector<std::string> bad;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  require(ach.n >= 1, "n >= 1");
  require(ach.m >= 1, "m >= 1");
  require(ach.a_c >= 0, "a_c >= 0");
  require(ach.a_s >= 0, "a_s >= 0");
  require(ach.b_c >= 1, "b_c >= 1");
  require(ach.b_s >= 1, "b_s >= 1");
  require(ach.pp_c > 0.0, "pp_c > 0");
  require(ach.pp_s > 0.0, "pp_s > 0");
  require(ach.pbar_c >= ach.pp_c, "pbar_c >= pp_c");
  require(ach.pbar_s >= ach.pp_s, "pbar_s >= pp_s");
  require(ach.sigma_z2 > 0.0, "sigma_z2 > 0");
  require(ach.n_theta >= 2, "n_theta >= 2");
  require(ach.mc_trials >= 100, "mc_trials >= 100");
  require(ach.trunc_tol > 0.0, "trunc_tol > 0");
  require(s_c >= 1, "s_c >= 1");
  require(s_s >= 1, "s_s >= 1");
  if (s_c >= 1) require(ach.n % s_c == 0, "s_c divides n");
  if (s_s >= 1) require(ach.n % s_s == 0, "s_s divides n");
  if (s_c >= 1 && ach.n % s_c == 0) {
    int nc = ach.n / s_c;
    require((nc & (nc - 1)) == 0, "n/s_c is a power of two (polar block)");
    require(ach.b_c + crc_r < nc, "b_c + crc_r < n/s_c");
  }
  require(q_grid >= 3, "q_grid >= 3");
  require(n_s_grid >= 3 && n_s_grid % 2 == 1, "n_s_grid odd and >= 3");
  require(n_stp >= 1, "n_stp >= 1");
  require(list_size >= 1, "list_size >= 1");
  require(crc_r >= 1 && crc_r <= 32, "crc_r in [1,32]");
  require((crc_poly & 1u) != 0, "crc_poly odd");
  require(trials >= 1, "trials >= 1");
  require(eps_target > 0.0 && eps_target <= 1.0, "eps_target in (0,1]");
  require(delta_target > 0.0, "delta_target > 0");
  if (!bad.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& b : bad) msg += " [" + b + "]";
    throw ValidationError(msg);
  }
}

namespace {

struct FieldMap {
  std::map<std::string, std::function<void(SystemConfig&, const std::string&)>> set;
  std::vector<std::pair<std::string, std::function<std::string(const SystemConfig&)>>> get;

  template <typename T>
  void field(const std::string& key, T SystemConfig::* p) {
    set[key] = [p](SystemConfig& c, const std::string& v) { parse_into(c.*p, v); };
    get.emplace_back(key, [p](const SystemConfig& c) { return format(c.*p); });
  }
  template <typename T>
  void afield(const std::string& key, T AchievabilityConfig::* p) {
    set[key] = [p](SystemConfig& c, const std::string& v) { parse_into(c.ach.*p, v); };
    get.emplace_back(key, [p](const SystemConfig& c) { return format(c.ach.*p); });
  }

  static void parse_into(int& dst, const std::string& v) { dst = std::stoi(v); }
  static void parse_into(double& dst, const std::string& v) { dst = std::stod(v); }
  static void parse_into(std::uint32_t& dst, const std::string& v) {
    dst = static_cast<std::uint32_t>(std::stoul(v, nullptr, 0));
  }
  static void parse_into(std::uint64_t& dst, const std::string& v) {
    dst = std::stoull(v, nullptr, 0);
  }
  static std::string format(int v) { return std::to_string(v); }
  static std::string format(std::uint32_t v) { return std::to_string(v); }
  static std::string format(std::uint64_t v) { return std::to_string(v); }
  static std::string format(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }
};

const FieldMap& fields() {
  static const FieldMap fm = [] {
    FieldMap f;
    f.afield("n", &AchievabilityConfig::n);
    f.afield("m", &AchievabilityConfig::m);
    f.afield("a_c", &AchievabilityConfig::a_c);
    f.afield("a_s", &AchievabilityConfig::a_s);
    f.afield("b_c", &AchievabilityConfig::b_c);
    f.afield("b_s", &AchievabilityConfig::b_s);
    f.afield("pp_c", &AchievabilityConfig::pp_c);
    f.afield("pp_s", &AchievabilityConfig::pp_s);
    f.afield("pbar_c", &AchievabilityConfig::pbar_c);
    f.afield("pbar_s", &AchievabilityConfig::pbar_s);
    f.afield("sigma_z2", &AchievabilityConfig::sigma_z2);
    f.afield("n_theta", &AchievabilityConfig::n_theta);
    f.afield("mc_trials", &AchievabilityConfig::mc_trials);
    f.afield("trunc_tol", &AchievabilityConfig::trunc_tol);
    f.field("s_c", &SystemConfig::s_c);
    f.field("s_s", &SystemConfig::s_s);
    f.field("q_grid", &SystemConfig::q_grid);
    f.field("n_s_grid", &SystemConfig::n_s_grid);
    f.field("n_stp", &SystemConfig::n_stp);
    f.field("list_size", &SystemConfig::list_size);
    f.field("crc_r", &SystemConfig::crc_r);
    f.field("crc_poly", &SystemConfig::crc_poly);
    f.field("trials", &SystemConfig::trials);
    f.field("seed", &SystemConfig::seed);
    f.field("eps_target", &SystemConfig::eps_target);
    f.field("delta_target", &SystemConfig::delta_target);
    return f;
  }();
  return fm;
}

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  SystemConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = strip(line.substr(0, eq));
    std::string val = strip(line.substr(eq + 1));
    auto it = fields().set.find(key);
    if (it == fields().set.end())
      throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    try {
      it->second(cfg, val);
    } catch (const std::exception&) {
      throw ValidationError("config line " + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SystemConfig& cfg) {
  std::string out;
  for (const auto& [key, get] : fields().get) out += key + " = " + get(cfg) + "\n";
  return out;
}

std::uint64_t config_hash(const SystemConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace unisac
