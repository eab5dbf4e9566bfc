// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/common.hpp"

#include <cmath>
#include <cstdio>

namespace asobo {

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string format_double(double v) {
  // %.17g always round-trips a double; trim to the shortest form that does.
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return std::string(buf);
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace asobo
