#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace netepi {

/// Floats are written with 12 significant digits.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace detail {

template <class T>
void csv_field(std::ostream& os, const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    os << format_real(static_cast<double>(v));
  } else {
    os << v;
  }
}

}  // namespace detail

/// Writes one comma-separated row terminated by LF.
template <class First, class... Rest>
void csv_row(std::ostream& os, const First& first, const Rest&... rest) {
  detail::csv_field(os, first);
  ((os << ',', detail::csv_field(os, rest)), ...);
  os << '\n';
}

}  // namespace netepi
