#include "fokker/format.hpp"

#include <cstdio>

namespace fokker {

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace fokker
