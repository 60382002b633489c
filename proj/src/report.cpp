#include "radmaxlab/report.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "radmaxlab/parallel.hpp"

namespace radmaxlab::harness {

namespace {

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string csv_cell(const Json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

Report::Report(std::string experiment, const ExperimentConfig& cfg)
    : experiment_(std::move(experiment)), config_(Json::object()), started_(now_iso()) {
  for (const auto& [k, v] : cfg.echo()) config_[k] = v;
}

Table& Report::table(const std::string& name, const std::string& reference, std::vector<std::string> columns) {
  for (auto& t : tables_)
    if (t.name == name) return t;
  tables_.push_back(Table{name, reference, std::move(columns), {}});
  return tables_.back();
}

void Report::add_row(Table& t, Json row) {
  if (!row.is_array() || row.size() != t.columns.size())
    throw InvalidInput("row does not match the columns of table " + t.name);
  t.rows.push_back(std::move(row));
}

void Report::fail(const std::string& why) {
  failed_ = true;
  failures_.push_back(why);
}

Json Report::body() const {
  Json b = Json::object();
  b["experiment"] = experiment_;
  b["config"] = config_;
  Json tables = Json::array();
  for (const auto& t : tables_) {
    Json jt = Json::object();
    jt["name"] = t.name;
    jt["reference"] = t.reference;
    jt["columns"] = t.columns;
    jt["rows"] = t.rows;
    tables.push_back(std::move(jt));
  }
  b["tables"] = std::move(tables);
  b["aggregates"] = aggregates_;
  b["notes"] = notes_;
  b["status"] = failed_ ? "failed" : "ok";
  b["failures"] = failures_;
  return b;
}

Json Report::metadata() const {
  Json m = Json::object();
  m["started"] = started_;
  m["finished"] = now_iso();
  m["threads"] = max_threads();
  return m;
}

std::string Report::to_json() const {
  Json all = Json::object();
  all["body"] = body();
  all["metadata"] = metadata();
  return all.dump(2);
}

std::string Report::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const auto& t = tables_[i];
    if (i) os << '\n';
    os << "# table: " << t.name << " (" << t.reference << ")\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_cell(row[c]);
      os << '\n';
    }
  }
  return os.str();
}

std::string Report::write(const std::string& dir, const std::string& format) const {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / experiment_;
  const std::string path = base.string() + (format == "csv" ? ".csv" : ".json");
  {
    std::ofstream os(path);
    if (!os) throw ResourceError("cannot write " + path);
    if (format == "csv") {
      os << to_csv();
    } else {
      os << body().dump(2) << '\n';
    }
  }
  std::ofstream meta(base.string() + ".meta.json");
  meta << metadata().dump(2) << '\n';
  return path;
}

Json method_cell(const std::string& method) { return Json(method); }

}  // namespace radmaxlab::harness
