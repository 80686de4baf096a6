#pragma once

#include <cstdio>
#include <string>

namespace tunnel::csv {

/// 17 significant digits: round-trips every double exactly.
inline std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace tunnel::csv
