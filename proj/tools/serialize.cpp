#include "serialize.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace radonbl::tools {

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::string& title, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "# radonbl " << title << " generated " << timestamp_utc() << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw InputError("write_csv: row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& value) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  value = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && errno != ERANGE;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells = split(line, ',');
    for (auto& c : cells) c = trim(c);
    if (!have_header) {
      table.header = cells;
      have_header = true;
    } else {
      table.rows.push_back(cells);
    }
  }
  if (!have_header) throw InputError(path + ": no CSV header");
  return table;
}

void write_json(const std::string& path, Json doc) {
  doc["generated"] = timestamp_utc();
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << doc.dump(2) << "\n";
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) {
    double v;
    if (!parse_number(part, v)) throw InputError("not a number: '" + trim(part) + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("empty number list");
  return out;
}

Matrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const std::string& row : split(text, ';')) rows.push_back(parse_list(row));
  if (rows.empty()) throw InputError("empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw InputError("matrix rows differ in length");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<Matrix> parse_maps(const std::string& text) {
  std::vector<Matrix> maps;
  for (const std::string& part : split(text, '|')) maps.push_back(parse_matrix(part));
  return maps;
}

namespace {

bool numbers_match(double a, double b, double rtol) {
  if (a == b) return true;
  if (std::isinf(rtol)) return true;
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b));
}

void compare_json(const Json& a, const Json& b, const std::string& where, double rtol, RegressReport& rep) {
  if (a.is_number() && b.is_number()) {
    if (!numbers_match(a.get<double>(), b.get<double>(), rtol)) {
      rep.status = 2;
      rep.messages.push_back(where + ": baseline " + format_double(a.get<double>()) + " current " +
                             format_double(b.get<double>()));
    }
    return;
  }
  if (a.type() != b.type()) {
    rep.status = 2;
    rep.messages.push_back("schema mismatch at " + where + ": value types differ");
    return;
  }
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (it.key() == "generated") continue;
      if (!b.contains(it.key())) {
        rep.status = 2;
        rep.messages.push_back("schema mismatch: key " + where + "/" + it.key() + " missing in current");
        continue;
      }
      compare_json(it.value(), b.at(it.key()), where + "/" + it.key(), rtol, rep);
    }
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (it.key() != "generated" && !a.contains(it.key())) {
        rep.status = 2;
        rep.messages.push_back("schema mismatch: key " + where + "/" + it.key() + " missing in baseline");
      }
    }
  } else if (a.is_array()) {
    if (a.size() != b.size()) {
      rep.status = 2;
      rep.messages.push_back("schema mismatch at " + where + ": array lengths differ");
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) compare_json(a[i], b[i], where + "/" + std::to_string(i), rtol, rep);
  } else if (a != b) {
    rep.status = 2;
    rep.messages.push_back(where + ": baseline " + a.dump() + " current " + b.dump());
  }
}

bool looks_like_json(const std::string& path) {
  const std::string text = read_file(path);
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && (text[pos] == '{' || text[pos] == '[');
}

}  // namespace

RegressReport regress(const std::string& baseline, const std::string& current, double rtol) {
  if (!(rtol >= 0.0)) throw InputError("regress: rtol must be nonnegative");
  RegressReport rep;
  const bool json_a = looks_like_json(baseline);
  const bool json_b = looks_like_json(current);
  if (json_a != json_b) {
    rep.status = 2;
    rep.messages.push_back("schema mismatch: one file is JSON, the other CSV");
    return rep;
  }
  if (json_a) {
    compare_json(read_json(baseline), read_json(current), "", rtol, rep);
    return rep;
  }
  const CsvTable a = read_csv(baseline);
  const CsvTable b = read_csv(current);
  if (a.header != b.header) {
    rep.status = 2;
    rep.messages.push_back("schema mismatch: CSV headers differ");
    return rep;
  }
  if (a.rows.size() != b.rows.size()) {
    rep.status = 2;
    rep.messages.push_back("schema mismatch: " + std::to_string(a.rows.size()) + " rows vs " +
                           std::to_string(b.rows.size()));
    return rep;
  }
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    if (a.rows[r].size() != a.header.size() || b.rows[r].size() != a.header.size()) {
      rep.status = 2;
      rep.messages.push_back("schema mismatch: row " + std::to_string(r + 1) + " has the wrong width");
      continue;
    }
    for (std::size_t c = 0; c < a.header.size(); ++c) {
      double x, y;
      const bool nx = parse_number(a.rows[r][c], x), ny = parse_number(b.rows[r][c], y);
      const bool same = (nx && ny) ? numbers_match(x, y, rtol) : a.rows[r][c] == b.rows[r][c];
      if (!same) {
        rep.status = 2;
        rep.messages.push_back("column " + a.header[c] + " row " + std::to_string(r + 1) + ": baseline " +
                               a.rows[r][c] + " current " + b.rows[r][c]);
      }
    }
  }
  return rep;
}

}  // namespace radonbl::tools
