#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace sbp {

inline constexpr const char* kToolName = "sbp";
inline constexpr const char* kToolVersion = "0.1.0";

/// Full-precision float formatting for files (%.17g round-trips doubles).
std::string format_full(double v);
/// 6 significant digits for console output.
std::string format_sig6(double v);

/// Run metadata emitted with every output so results are reproducible from
/// their own header. Parameter order is fixed by insertion order.
struct Provenance {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;
  void add(const std::string& key, const std::string& value) {
    params.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    params.emplace_back(key, format_full(value));
  }
  void add(const std::string& key, long long value) {
    params.emplace_back(key, std::to_string(value));
  }
};

/// Column-typed table with a versioned schema name; renders as CSV (comment
/// provenance header) or JSON (provenance object + row objects). Output is
/// deterministic byte-for-byte for identical inputs.
class Table {
 public:
  Table(std::string schema, std::vector<std::string> columns)
      : schema_(std::move(schema)), columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& columns() const { return columns_; }
  size_t rows() const { return rows_.size(); }

  void write_csv(std::ostream& os, const Provenance& prov) const;
  void write_json(std::ostream& os, const Provenance& prov) const;

 private:
  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes the table in the requested format ("csv" or "json"); creating the
/// file or throwing parameter_error on failure.
void write_table(const std::string& path, const std::string& format,
                 const Table& table, const Provenance& prov);

}  // namespace sbp
