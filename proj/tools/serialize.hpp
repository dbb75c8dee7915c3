#ifndef RADONBL_TOOLS_SERIALIZE_HPP
#define RADONBL_TOOLS_SERIALIZE_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "radonbl/common.hpp"

namespace radonbl::tools {

using Json = nlohmann::json;

std::string timestamp_utc();
std::string format_double(double v);  // 17 significant digits, '.' decimal

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// The first line is a "# ..." comment carrying the title and a timestamp;
// readers and regress skip comment lines.
void write_csv(const std::string& path, const std::string& title, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
CsvTable read_csv(const std::string& path);

// Adds a "generated" timestamp key, which regress ignores.
void write_json(const std::string& path, Json doc);
Json read_json(const std::string& path);

std::vector<double> parse_list(const std::string& text);  // "1,2,3"
Matrix parse_matrix(const std::string& text);             // rows by ';', entries by ','
std::vector<Matrix> parse_maps(const std::string& text);  // matrices by '|'

struct RegressReport {
  int status = 0;  // 0 match, 2 mismatch or schema mismatch
  std::vector<std::string> messages;
};

RegressReport regress(const std::string& baseline, const std::string& current, double rtol);

}  // namespace radonbl::tools

#endif  // RADONBL_TOOLS_SERIALIZE_HPP
