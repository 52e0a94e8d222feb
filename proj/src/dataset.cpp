#include "rheoflow/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rheoflow {

void RheologyDataset::validate() const {
  if (samples.size() < 2)
    throw std::invalid_argument("dataset '" + name + "': need at least 2 samples");
  for (const auto& [x, y] : samples) {
    if (!std::isfinite(x) || x < 0.0)
      throw std::invalid_argument("dataset '" + name + "': shear rates must be finite and non-negative");
    if (!std::isfinite(y))
      throw std::invalid_argument("dataset '" + name + "': viscosities must be finite");
  }
}

double RheologyDataset::max_shear_rate() const {
  double m = 0.0;
  for (const auto& [x, y] : samples) m = std::max(m, x);
  return m;
}

namespace {

double parse_field(const std::string& field, const std::string& path, std::size_t line_no,
                   const char* what) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{}) {
    throw CsvParseError(path + ":" + std::to_string(line_no) + ": bad " + what + " value '" +
                        field + "'");
  }
  return v;
}

}  // namespace

RheologyDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvParseError("cannot open dataset file: " + path);

  RheologyDataset ds;
  auto slash = path.find_last_of('/');
  ds.name = slash == std::string::npos ? path : path.substr(slash + 1);
  if (auto dot = ds.name.find_last_of('.'); dot != std::string::npos) ds.name.resize(dot);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw CsvParseError(path + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "shear_rate,viscosity")
    throw CsvParseError(path + ":1: expected header 'shear_rate,viscosity', got '" + line + "'");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw CsvParseError(path + ":" + std::to_string(line_no) + ": expected 2 comma-separated fields");
    double x = parse_field(line.substr(0, comma), path, line_no, "shear_rate");
    double y = parse_field(line.substr(comma + 1), path, line_no, "viscosity");
    ds.samples.emplace_back(x, y);
  }
  ds.validate();
  return ds;
}

void save_dataset_csv(const RheologyDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out << "shear_rate,viscosity\n";
  out.precision(17);
  for (const auto& [x, y] : ds.samples) out << x << ',' << y << '\n';
}

}  // namespace rheoflow
