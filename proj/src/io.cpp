#include "qcorr/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace qcorr::io {
namespace {

[[noreturn]] void fail(const std::filesystem::path& path,
                       const std::string& why) {
  throw std::runtime_error(path.string() + ": " + why);
}

double parse_cell(const std::filesystem::path& path, std::string cell,
                  std::size_t row, std::size_t col) {
  // trim whitespace
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!cell.empty() && is_space(cell.front())) cell.erase(cell.begin());
  while (!cell.empty() && is_space(cell.back())) cell.pop_back();
  if (cell.empty()) {
    fail(path, "empty cell at row " + std::to_string(row + 1) + ", column " +
                   std::to_string(col + 1));
  }
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    fail(path, "cell '" + cell + "' at row " + std::to_string(row + 1) +
                   ", column " + std::to_string(col + 1) +
                   " is not a number");
  }
  if (!std::isfinite(value)) {
    fail(path, "cell at row " + std::to_string(row + 1) + ", column " +
                   std::to_string(col + 1) +
                   " is not finite (NaN/Inf rejected)");
  }
  return value;
}

RawArray load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row_idx = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const bool blank =
        std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c) != 0; });
    if (blank) {
      ++row_idx;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col_idx = 0;
    while (std::getline(ss, cell, ',')) {
      row.push_back(parse_cell(path, cell, row_idx, col_idx));
      ++col_idx;
    }
    rows.push_back(std::move(row));
    ++row_idx;
  }
  if (rows.empty()) fail(path, "no values found");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      fail(path, "row " + std::to_string(r + 1) + " has " +
                     std::to_string(rows[r].size()) + " cells, expected " +
                     std::to_string(rows[0].size()));
    }
  }
  RawArray out;
  if (rows.size() == 1) {
    out.values = std::move(rows[0]);
  } else if (rows[0].size() == 1) {
    for (const auto& r : rows) out.values.push_back(r[0]);
  } else {
    if (rows.size() != rows[0].size()) {
      fail(path, "2D input must be square, got " +
                     std::to_string(rows.size()) + " rows x " +
                     std::to_string(rows[0].size()) + " columns");
    }
    out.side = static_cast<unsigned>(rows.size());
    for (const auto& r : rows) {
      out.values.insert(out.values.end(), r.begin(), r.end());
    }
  }
  return out;
}

double json_number(const std::filesystem::path& path,
                   const nlohmann::json& v) {
  if (!v.is_number()) {
    fail(path, "JSON value " + v.dump() + " is not a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "non-finite JSON value (NaN/Inf rejected)");
  return x;
}

RawArray load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(path, std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_array() || doc.empty()) {
    fail(path, "expected a non-empty JSON array");
  }
  RawArray out;
  if (doc[0].is_array()) {
    const std::size_t side = doc.size();
    for (const auto& row : doc) {
      if (!row.is_array() || row.size() != side) {
        fail(path, "nested JSON arrays must form a square matrix");
      }
      for (const auto& v : row) out.values.push_back(json_number(path, v));
    }
    out.side = static_cast<unsigned>(side);
  } else {
    for (const auto& v : doc) out.values.push_back(json_number(path, v));
  }
  return out;
}

}  // namespace

RawArray load_array(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return load_csv(path);
  if (ext == ".json") return load_json(path);
  fail(path, "unsupported extension '" + ext + "' (expected .csv or .json)");
}

std::vector<std::pair<std::string, RawArray>> load_array_directory(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error(dir.string() + ": not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".csv" || ext == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, RawArray>> out;
  out.reserve(files.size());
  for (const auto& f : files) {
    out.emplace_back(f.filename().string(), load_array(f));
  }
  if (out.empty()) {
    throw std::runtime_error(dir.string() +
                             ": no .csv or .json arrays found");
  }
  return out;
}

}  // namespace qcorr::io
