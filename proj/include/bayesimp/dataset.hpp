#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "bayesimp/errors.hpp"

namespace bayesimp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Columnar sample table. D1 holds (treatment, adjustment, mediator) columns,
// D2 holds (mediator, target).
class DataTable {
 public:
  DataTable() = default;

  void add_column(std::string name, VectorXd values);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  bool has_column(std::string_view name) const;

  const VectorXd& col(std::string_view name) const;
  // Stack named columns into an N x k point matrix.
  MatrixXd cols(const std::vector<std::string>& names) const;

 private:
  Eigen::Index rows_ = 0;
  std::vector<std::string> names_;
  std::vector<VectorXd> columns_;
};

}  // namespace bayesimp
