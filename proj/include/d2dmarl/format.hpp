#pragma once

// Formatting helpers shared by CSV/log writers. %.17g round-trips IEEE
// doubles exactly, which the byte-identical rerun guarantee relies on.

#include <cstdio>
#include <string>

namespace d2dmarl {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace d2dmarl
