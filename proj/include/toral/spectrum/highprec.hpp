#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>

#include "toral/exact/matrix.hpp"

namespace toral {

// 100 decimal digits; used where binary64 would not certify.
using HP = boost::multiprecision::cpp_bin_float_100;
using HPC = boost::multiprecision::cpp_complex_100;

inline HP to_hp(const Integer& x) { return HP(x.get_str()); }
inline HP to_hp(const Rational& x) { return to_hp(x.get_num()) / to_hp(x.get_den()); }

/// Largest double not above x.
inline double lower_double(const HP& x) {
  double d = static_cast<double>(x);
  if (HP(d) > x) d = std::nextafter(d, -INFINITY);
  return d;
}

/// Smallest double not below x.
inline double upper_double(const HP& x) {
  double d = static_cast<double>(x);
  if (HP(d) < x) d = std::nextafter(d, INFINITY);
  return d;
}

}  // namespace toral
