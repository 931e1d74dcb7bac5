#include "bayesimp/dataset.hpp"

#include <algorithm>

namespace bayesimp {

void DataTable::add_column(std::string name, VectorXd values) {
  if (has_column(name)) throw ParameterError("dataset: duplicate column '" + name + "'");
  if (!names_.empty() && values.size() != rows_) {
    throw DimensionError("dataset: column '" + name + "' has mismatched length");
  }
  rows_ = values.size();
  names_.push_back(std::move(name));
  columns_.push_back(std::move(values));
}

bool DataTable::has_column(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const VectorXd& DataTable::col(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return columns_[i];
  }
  throw ParameterError("dataset: missing column '" + std::string(name) + "'");
}

MatrixXd DataTable::cols(const std::vector<std::string>& names) const {
  if (names.empty()) throw ParameterError("dataset: no columns requested");
  MatrixXd m(rows_, static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    m.col(static_cast<Eigen::Index>(j)) = col(names[j]);
  }
  return m;
}

}  // namespace bayesimp
