#pragma once

#include <string>

namespace curvmeas {

struct MeasureEstimate {
  int m = -1;
  double value = 0;
  double stderr_ = 0;
  std::string method;       // "global", "stratified", "steiner"
  double uncaptured = 0;    // level-set measure lost to dropped patches
};

}  // namespace curvmeas
