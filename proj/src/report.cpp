#include "campanato/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace campanato {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ReportWriter::section(const std::string& name) {
  if (!text_.empty()) text_ += "\n";
  text_ += "[" + name + "]\n";
}

void ReportWriter::kv(const std::string& key, const std::string& value) {
  text_ += key + " = " + value + "\n";
}
void ReportWriter::kv(const std::string& key, const char* value) { kv(key, std::string(value)); }
void ReportWriter::kv(const std::string& key, double value) { kv(key, format_double(value)); }
void ReportWriter::kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
void ReportWriter::kv(const std::string& key, std::size_t value) { kv(key, std::to_string(value)); }
void ReportWriter::kv(const std::string& key, bool value) {
  kv(key, std::string(value ? "true" : "false"));
}

void ReportWriter::write(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << text_;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CSV row width does not match the header");
  rows_.push_back(cells);
}

std::string CsvWriter::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += "\n";
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << str();
}

}  // namespace campanato
