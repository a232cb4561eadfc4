#include "osgm/types.hpp"

#include <cstdio>

namespace osgm {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace osgm
