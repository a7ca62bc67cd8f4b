#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace saddlekit {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VecRef = Eigen::Ref<const Vector>;
using MatRef = Eigen::Ref<const Matrix>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point outside the domain of a function or distance generating function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Combination of set, DGF and operation with no implemented prox or diameter.
class UnsupportedGeometry : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace saddlekit
