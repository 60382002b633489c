#pragma once

#include <deque>
#include <string>
#include <vector>

#include "json.hpp"
#include "radmaxlab/config.hpp"

namespace radmaxlab::harness {

using Json = nlohmann::ordered_json;

struct Table {
  std::string name;
  /// Which estimate the table addresses, e.g. "kato_square_root".
  std::string reference;
  std::vector<std::string> columns;
  std::vector<Json> rows;  // each row is an array aligned with columns
};

/// Experiment output. The body is a pure function of config and seed; the
/// metadata block holds timestamps and the thread count.
class Report {
 public:
  Report(std::string experiment, const ExperimentConfig& cfg);

  Table& table(const std::string& name, const std::string& reference, std::vector<std::string> columns);
  void add_row(Table& t, Json row);
  Json& aggregates() { return aggregates_; }
  void note(const std::string& s) { notes_.push_back(s); }
  void fail(const std::string& why);
  bool failed() const { return failed_; }
  const std::deque<Table>& tables() const { return tables_; }

  Json body() const;
  Json metadata() const;
  /// {"body": ..., "metadata": ...}
  std::string to_json() const;
  /// One CSV block per table, "# table: name" separated.
  std::string to_csv() const;
  /// Writes <experiment>.<format> and <experiment>.meta.json into dir;
  /// returns the report path.
  std::string write(const std::string& dir, const std::string& format) const;

 private:
  std::string experiment_;
  Json config_;
  std::deque<Table> tables_;
  Json aggregates_ = Json::object();
  std::vector<std::string> notes_;
  bool failed_ = false;
  std::vector<std::string> failures_;
  std::string started_;
};

/// Method tag and standard error columns for a NormEstimate-like value.
Json method_cell(const std::string& method);

}  // namespace radmaxlab::harness
