#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "engset/error.hpp"
#include "engset/experiments.hpp"

namespace engset {
namespace {

void write_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw DomainError("CSV: unterminated quoted field");
  return fields;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw DomainError("CSV: bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw DomainError("CSV: bad integer '" + s + "'");
  return static_cast<int>(v);
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.9g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    write_field(out, r.name);
    out << ',' << r.channels << ',' << r.wavelengths << ',' << format_float(r.load) << ','
        << format_float(r.tui) << ',';
    write_field(out, r.model);
    out << ',';
    write_field(out, r.metric);
    out << ',';
    if (r.value) out << format_float(*r.value);
    out << ',';
    if (r.ci_half_width) out << format_float(*r.ci_half_width);
    out << ',';
    write_field(out, r.status);
    out << ',';
    write_field(out, r.note);
    out << '\n';
  }
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

std::vector<SweepRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw DomainError("CSV: unexpected header '" + line + "'");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_record(line);
    if (f.size() != 11) throw DomainError("CSV: expected 11 fields, got " + std::to_string(f.size()));
    SweepRow r;
    r.name = f[0];
    r.channels = parse_int(f[1]);
    r.wavelengths = parse_int(f[2]);
    r.load = parse_double(f[3]);
    r.tui = parse_double(f[4]);
    r.model = f[5];
    r.metric = f[6];
    r.value = parse_optional(f[7]);
    r.ci_half_width = parse_optional(f[8]);
    r.status = f[9];
    r.note = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace engset
