#ifndef FIELDCALC_COMMON_HPP
#define FIELDCALC_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fieldcalc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enumeration or work-estimate guard tripped. Maps to CLI exit code 1.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: singular metric, non-convergent iteration, tolerance
/// breach. Maps to CLI exit code 1.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed input or violated precondition. Maps to CLI exit code 2.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Finite weighted point set standing in for the base space: m points with
/// positive quadrature weights w_x. All Guichardet integrals contract with
/// these weights.
struct BaseSpace {
  std::vector<double> weights;

  BaseSpace() = default;
  explicit BaseSpace(std::vector<double> w) : weights(std::move(w)) {
    for (double wx : weights) {
      if (!(wx > 0.0)) throw InvalidInput("BaseSpace: weights must be positive");
    }
    if (weights.empty()) throw InvalidInput("BaseSpace: need at least one point");
  }

  static BaseSpace uniform(int m, double w = 1.0) {
    return BaseSpace(std::vector<double>(static_cast<std::size_t>(m), w));
  }

  int size() const { return static_cast<int>(weights.size()); }
  double weight(int x) const { return weights[static_cast<std::size_t>(x)]; }
};

/// Contravariant source vector j^x, one entry per base-space point.
using Source = std::vector<double>;

/// n! as a double; exact for n <= 22, throws beyond 170 (overflow).
double factorial(int n);

/// Binomial coefficient as a double, exact for the small arguments used here.
double binomial(int n, int k);

}  // namespace fieldcalc

#endif  // FIELDCALC_COMMON_HPP
