#include "skewop/prec.hpp"

#include <cmath>
#include <sstream>

namespace skewop {

namespace {
unsigned g_bits = 256;
}  // namespace

int decimal_digits_for_bits(unsigned bits) {
  // log10(2) = 0.30103...; +3 guard digits guarantee the decimal string
  // carries strictly more information than the binary significand.
  return static_cast<int>(std::ceil(bits * 0.3010299956639812)) + 3;
}

void set_precision_bits(unsigned bits) {
  if (bits < 64) bits = 64;
  g_bits = bits;
  boost::multiprecision::mpfr_float::default_precision(
      decimal_digits_for_bits(bits));
}

unsigned precision_bits() { return g_bits; }

namespace {
// Make the default 256-bit setting take effect before any Real is created,
// including Reals in other translation units' static initializers run after
// this one (the library default would otherwise be much lower).
const bool g_precision_initialized = [] {
  set_precision_bits(g_bits);
  return true;
}();
}  // namespace

std::string to_decimal(const Real& x) {
  // Size the digit count from the variable's actual mpfr precision: the
  // library sets precision in decimal digits and rounds the bit count up,
  // so values hold slightly more bits than the nominal setting and a digit
  // count derived from the nominal bits would not round-trip exactly.
  unsigned actual_bits =
      static_cast<unsigned>(mpfr_get_prec(x.backend().data()));
  if (actual_bits < 2) actual_bits = 2;
  return x.str(decimal_digits_for_bits(actual_bits), std::ios_base::scientific);
}

Real from_decimal(const std::string& s) { return Real(s); }

PrecisionScope::PrecisionScope(unsigned bits) : saved_bits_(g_bits) {
  set_precision_bits(bits);
}

PrecisionScope::~PrecisionScope() { set_precision_bits(saved_bits_); }

}  // namespace skewop
