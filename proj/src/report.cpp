#include "sbp/report.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "sbp/errors.hpp"

namespace sbp {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw parameter_error("Table: row width mismatch");
  rows_.push_back(std::move(cells));
}

void Table::write_csv(std::ostream& os, const Provenance& prov) const {
  os << "# tool=" << kToolName << " version=" << kToolVersion << "\n";
  os << "# command=" << prov.command << "\n";
  for (const auto& [k, v] : prov.params) os << "# " << k << "=" << v << "\n";
  os << "# schema=" << schema_ << "\n";
  for (size_t i = 0; i < columns_.size(); ++i)
    os << columns_[i] << (i + 1 == columns_.size() ? '\n' : ',');
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i)
      os << row[i] << (i + 1 == row.size() ? '\n' : ',');
  }
}

void Table::write_json(std::ostream& os, const Provenance& prov) const {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = prov.command;
  nlohmann::ordered_json params;
  for (const auto& [k, v] : prov.params) params[k] = v;
  j["params"] = params;
  j["schema"] = schema_;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json obj;
    for (size_t i = 0; i < row.size(); ++i) obj[columns_[i]] = row[i];
    rows.push_back(obj);
  }
  j["rows"] = rows;
  os << j.dump(2) << "\n";
}

void write_table(const std::string& path, const std::string& format,
                 const Table& table, const Provenance& prov) {
  std::ofstream out(path);
  if (!out) throw parameter_error("write_table: cannot open " + path);
  if (format == "csv")
    table.write_csv(out, prov);
  else if (format == "json")
    table.write_json(out, prov);
  else
    throw parameter_error("write_table: format must be csv or json");
}

}  // namespace sbp
