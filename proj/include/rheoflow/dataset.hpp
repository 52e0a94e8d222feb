#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rheoflow {

/// Shear-rate / viscosity measurement pairs, as read from a rheometer CSV.
struct RheologyDataset {
  std::string name;
  std::vector<std::pair<double, double>> samples;  // (shear_rate, viscosity)

  void validate() const;
  double max_shear_rate() const;
};

struct CsvParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CSV schema: header "shear_rate,viscosity", one sample per row.
RheologyDataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const RheologyDataset& ds, const std::string& path);

}  // namespace rheoflow
