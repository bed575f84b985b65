#pragma once

#include <Eigen/Dense>
#include <complex>

namespace evsel {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Index = Eigen::Index;
using Complex = std::complex<double>;

}  // namespace evsel
