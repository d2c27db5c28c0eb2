#include "mfun/grid_io.hpp"

#include <cstdio>

namespace mfun {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace mfun
