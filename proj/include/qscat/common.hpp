#ifndef QSCAT_COMMON_HPP
#define QSCAT_COMMON_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qscat {

using complexd = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr complexd iunit{0.0, 1.0};

/// Bad user input: parameters, files, grids. CLI maps this to exit code 2.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: unwrap ambiguity, consistency residuals, norm drift,
/// empty channels. CLI maps this to exit code 1.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qscat

#endif
