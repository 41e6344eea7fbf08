#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <optional>
#include <string>
#include <string_view>

namespace rlp {

// All knowledge-base values, LP coefficients and grounding arithmetic are
// exact rationals. Edge colors in lifting are classes of *equal* coefficient
// values, so value comparison has to be exact end to end.
using Rational = mpq_class;

using RatVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RatMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RatSparse = Eigen::SparseMatrix<Rational>;

// Parses "7", "-3.25", "1/3". Decimal literals become exact rationals
// (0.75 -> 3/4). Returns nullopt on malformed input.
std::optional<Rational> parse_rational(std::string_view text);

// "p/q" for non-integers, plain integer text otherwise.
std::string to_string(const Rational& q);

// Shortest decimal that round-trips through a double.
std::string format_double(double x);

double to_double(const Rational& q);

}  // namespace rlp

namespace Eigen {
template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
};
}  // namespace Eigen
