#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "pngsfp/errors.hpp"

namespace pngsfp {

// Deterministic CSV assembly; numbers printed with 17 significant digits so
// doubles round-trip exactly and re-runs are byte-identical.
class CsvWriter {
 public:
  void field(const std::string& s) {
    sep();
    out_ += s;
  }
  void number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    field(buf);
  }
  void integer(long long v) { field(std::to_string(v)); }
  void endrow() {
    out_ += '\n';
    first_ = true;
  }
  const std::string& str() const { return out_; }

 private:
  void sep() {
    if (!first_) out_ += ',';
    first_ = false;
  }
  std::string out_;
  bool first_ = true;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace pngsfp
