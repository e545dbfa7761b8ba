#pragma once

#include <Eigen/Dense>
#include <complex>

namespace lisac {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace lisac
