#include "radmaxlab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace radmaxlab::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  std::string out = s.substr(b, e - b + 1);
  if (out.size() >= 2 && (out.front() == '"' || out.front() == '\'') && out.back() == out.front())
    out = out.substr(1, out.size() - 2);
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("invalid value for " + key + ": '" + v + "'");
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list item in '" + s + "'");
    out.push_back(parse_number<double>("list", item));
  }
  if (out.empty()) throw ConfigError("empty list: '" + s + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list item in '" + s + "'");
    out.push_back(parse_number<int>("list", item));
  }
  if (out.empty()) throw ConfigError("empty list: '" + s + "'");
  return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "experiment") experiment = v;
  else if (key == "space") space = v;
  else if (key == "n") n = parse_number<int>(key, v);
  else if (key == "J" || key == "grid") J = parse_number<int>(key, v);
  else if (key == "N") N = parse_number<int>(key, v);
  else if (key == "p") p = parse_double_list(v);
  else if (key == "eps") eps = parse_number<double>(key, v);
  else if (key == "ensemble") ensemble = parse_number<int>(key, v);
  else if (key == "ensemble_kind") ensemble_kind = v;
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, v);
  else if (key == "m") m = parse_number<int>(key, v);
  else if (key == "lambda") lambda = parse_number<double>(key, v);
  else if (key == "Lambda") Lambda = parse_number<double>(key, v);
  else if (key == "restarts") restarts = parse_number<int>(key, v);
  else if (key == "sweeps") sweeps = parse_number<int>(key, v);
  else if (key == "budget") budget = parse_number<std::int64_t>(key, v);
  else if (key == "nodes_per_decade") nodes_per_decade = parse_number<int>(key, v);
  else if (key == "J_list") J_list = parse_int_list(v);
  else if (key == "out" || key == "out_dir") out_dir = v;
  else if (key == "format") {
    if (v != "json" && v != "csv") throw ConfigError("format must be json or csv");
    format = v;
  } else throw ConfigError("unknown configuration key: " + key);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  return {{"experiment", experiment},
          {"space", space},
          {"n", std::to_string(n)},
          {"J", std::to_string(J)},
          {"N", std::to_string(N)},
          {"p", join(p)},
          {"eps", fmt(eps)},
          {"ensemble", std::to_string(ensemble)},
          {"ensemble_kind", ensemble_kind},
          {"seed", std::to_string(seed)},
          {"m", std::to_string(m)},
          {"lambda", fmt(lambda)},
          {"Lambda", fmt(Lambda)},
          {"restarts", std::to_string(restarts)},
          {"sweeps", std::to_string(sweeps)},
          {"budget", std::to_string(budget)},
          {"nodes_per_decade", std::to_string(nodes_per_decade)},
          {"J_list", join(J_list)},
          {"format", format}};
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace radmaxlab::harness
