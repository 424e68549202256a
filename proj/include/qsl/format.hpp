#pragma once

#include <cstdio>
#include <string>

namespace qsl {

/// Locale-independent, 12 significant digits.
inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace qsl
