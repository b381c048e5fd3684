#pragma once

#include <string>
#include <vector>

namespace campanato {

/// Formats a double with 17 significant digits (round-trip safe).
std::string format_double(double v);

/// Structured-text report: named sections of key = value lines. Content is
/// fully determined by what was appended; no timestamps.
class ReportWriter {
 public:
  void section(const std::string& name);
  void kv(const std::string& key, const std::string& value);
  void kv(const std::string& key, const char* value);
  void kv(const std::string& key, double value);
  void kv(const std::string& key, int value);
  void kv(const std::string& key, std::size_t value);
  void kv(const std::string& key, bool value);
  std::string str() const { return text_; }
  void write(const std::string& path) const;

 private:
  std::string text_;
};

/// CSV with a fixed header; floats at 17 significant digits. Byte-identical
/// output for identical inputs.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace campanato
