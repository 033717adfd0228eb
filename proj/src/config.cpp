#include "lora/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lora/errors.hpp"

namespace lora::config {

namespace {

constexpr double kPerKm2 = 1.0e-6;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double to_double(const std::string& text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw std::invalid_argument("'" + text + "' is not a number");
  return v;
}

std::uint64_t to_u64(const std::string& text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw std::invalid_argument("'" + text + "' is not a non-negative integer");
  return v;
}

int to_int(const std::string& text) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw std::invalid_argument("'" + text + "' is not an integer");
  return v;
}

bool to_bool(const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw std::invalid_argument("'" + text + "' is not a boolean");
}

using Setter = std::function<void(sweep::SweepSpec&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"lambda_gw_per_km2", [](auto& s, const auto& v) { s.fixed.lambda_gw = to_double(v) * kPerKm2; }},
      {"lambda_ed_per_km2", [](auto& s, const auto& v) { s.fixed.lambda_ed = to_double(v) * kPerKm2; }},
      {"theta_active", [](auto& s, const auto& v) { s.fixed.theta_active = to_double(v); }},
      {"duty_cycle", [](auto& s, const auto& v) { s.fixed.rho = to_double(v); }},
      {"n_channels", [](auto& s, const auto& v) { s.fixed.n_ch = to_int(v); }},
      {"p_tot_dbm", [](auto& s, const auto& v) { s.fixed.p_tot_dbm = to_double(v); }},
      {"path_loss_exponent", [](auto& s, const auto& v) { s.fixed.beta = to_double(v); }},
      {"carrier_hz", [](auto& s, const auto& v) { s.fixed.fc_hz = to_double(v); }},
      {"bandwidth_hz", [](auto& s, const auto& v) { s.fixed.bw_hz = to_double(v); }},
      {"noise_figure_db", [](auto& s, const auto& v) { s.fixed.nf_db = to_double(v); }},
      {"coding_rate", [](auto& s, const auto& v) { s.fixed.cr = to_int(v); }},
      {"sweep.variable", [](auto& s, const auto& v) { s.variable = sweep::parse_variable(v); }},
      {"sweep.values",
       [](auto& s, const auto& v) {
         s.values.clear();
         for (const auto& item : split_list(v)) s.values.push_back(to_double(item));
       }},
      {"schemes",
       [](auto& s, const auto& v) {
         s.schemes.clear();
         for (const auto& item : split_list(v)) s.schemes.push_back(parse_scheme(item));
       }},
      {"modes",
       [](auto& s, const auto& v) {
         s.modes.clear();
         for (const auto& item : split_list(v)) s.modes.push_back(analysis::parse_mode(item));
       }},
      {"simulate", [](auto& s, const auto& v) { s.with_simulation = to_bool(v); }},
      {"sim.iterations", [](auto& s, const auto& v) { s.sim.n_iterations = to_u64(v); }},
      {"sim.seed", [](auto& s, const auto& v) { s.sim.rng_seed = to_u64(v); }},
      {"sim.near_radius_m", [](auto& s, const auto& v) { s.sim.region_radius_m = to_double(v); }},
      {"sim.far_radius_m", [](auto& s, const auto& v) { s.sim.far_radius_m = to_double(v); }},
      {"sim.near_factor", [](auto& s, const auto& v) { s.sim.near_factor = to_double(v); }},
      {"sim.far_factor", [](auto& s, const auto& v) { s.sim.far_factor = to_double(v); }},
      {"sim.interference", [](auto& s, const auto& v) { s.sim.interference_enabled = to_bool(v); }},
      {"sim.fidelity", [](auto& s, const auto& v) { s.sim.fidelity = sim::parse_fidelity(v); }},
      {"sim.threads", [](auto& s, const auto& v) { s.sim.threads = static_cast<unsigned>(to_u64(v)); }},
  };
  return table;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F render) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += render(items[i]);
  }
  return out;
}

}  // namespace

sweep::SweepSpec parse(std::istream& in) {
  sweep::SweepSpec spec;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", line_no);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line_no);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line_no);
    try {
      it->second(spec, value);
    } catch (const std::exception& e) {
      throw ConfigError(key + ": " + e.what(), line_no);
    }
  }
  return spec;
}

sweep::SweepSpec load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return parse(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string format(const sweep::SweepSpec& s) {
  const NetworkParams& p = s.fixed;
  std::ostringstream os;
  os << "lambda_gw_per_km2 = " << num(p.lambda_gw / kPerKm2) << '\n'
     << "lambda_ed_per_km2 = " << num(p.lambda_ed / kPerKm2) << '\n'
     << "theta_active = " << num(p.theta_active) << '\n'
     << "duty_cycle = " << num(p.rho) << '\n'
     << "n_channels = " << p.n_ch << '\n'
     << "p_tot_dbm = " << num(p.p_tot_dbm) << '\n'
     << "path_loss_exponent = " << num(p.beta) << '\n'
     << "carrier_hz = " << num(p.fc_hz) << '\n'
     << "bandwidth_hz = " << num(p.bw_hz) << '\n'
     << "noise_figure_db = " << num(p.nf_db) << '\n'
     << "coding_rate = " << p.cr << '\n'
     << "sweep.variable = " << sweep::to_string(s.variable) << '\n'
     << "sweep.values = " << join(s.values, num) << '\n'
     << "schemes = " << join(s.schemes, [](SfScheme x) { return std::string(to_string(x)); }) << '\n'
     << "modes = "
     << join(s.modes, [](analysis::InterferenceMode x) { return std::string(analysis::to_string(x)); })
     << '\n'
     << "simulate = " << (s.with_simulation ? "true" : "false") << '\n'
     << "sim.iterations = " << s.sim.n_iterations << '\n'
     << "sim.seed = " << s.sim.rng_seed << '\n'
     << "sim.near_radius_m = " << num(s.sim.region_radius_m) << '\n'
     << "sim.far_radius_m = " << num(s.sim.far_radius_m) << '\n'
     << "sim.near_factor = " << num(s.sim.near_factor) << '\n'
     << "sim.far_factor = " << num(s.sim.far_factor) << '\n'
     << "sim.interference = " << (s.sim.interference_enabled ? "true" : "false") << '\n'
     << "sim.fidelity = " << sim::to_string(s.sim.fidelity) << '\n'
     << "sim.threads = " << s.sim.threads << '\n';
  return os.str();
}

std::string default_text() {
  return R"(# lora-dl configuration. Densities per km^2, powers in dBm.

# Network
lambda_gw_per_km2 = 2
lambda_ed_per_km2 = 1000
theta_active = 0.01        # fraction of EDs active in a slot
duty_cycle = 0.01          # rho, per channel
n_channels = 8
p_tot_dbm = 25             # split evenly over the channels
path_loss_exponent = 2.9
carrier_hz = 868e6
bandwidth_hz = 125e3
noise_figure_db = 6
coding_rate = 1            # 4/(4+cr)

# Sweep: p_tot_dbm | density_ratio | duty_cycle | theta_active
sweep.variable = p_tot_dbm
sweep.values = 5, 10, 15, 20, 25, 30
schemes = fair, random
modes = co, both

# Monte-Carlo
simulate = false
sim.iterations = 100000
sim.seed = 1
sim.near_radius_m = 0      # 0: near_factor x distance scale
sim.far_radius_m = 0       # 0: far_factor x distance scale
sim.near_factor = 5
sim.far_factor = 60
sim.interference = true
sim.fidelity = full        # full | thinned
sim.threads = 0            # 0: all hardware threads
)";
}

}  // namespace lora::config
