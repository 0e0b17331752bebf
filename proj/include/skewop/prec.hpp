#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <string>

namespace skewop {

// Arbitrary-precision real used during family construction. Precision is a
// process-global working setting (in bits); each value carries the precision
// it was created with, so finished families stay intact after the working
// precision changes.
using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

// Working precision control. The underlying library tracks decimal digits,
// so the requested bit count is converted (rounding up); precision_bits()
// reports the last requested value.
void set_precision_bits(unsigned bits);
unsigned precision_bits();

// Decimal digits needed so that from_decimal(to_decimal(x)) == x at the same
// working precision.
int decimal_digits_for_bits(unsigned bits);

// Decimal-string round trip used by all on-disk formats.
std::string to_decimal(const Real& x);
Real from_decimal(const std::string& s);

inline double to_double(const Real& x) { return x.convert_to<double>(); }

// RAII helper: set working precision on entry, restore on exit.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_bits_;
};

}  // namespace skewop
