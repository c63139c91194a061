#pragma once

#include <cstdio>
#include <string>

namespace humor {

inline std::string format_double(double value, int precision = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, value);
  return buf;
}

}  // namespace humor
