#pragma once

#include "mmi/classifier.hpp"
#include "mmi/common.hpp"
#include "mmi/cross_validation.hpp"
#include "mmi/data.hpp"
#include "mmi/kde_mi.hpp"
#include "mmi/losses.hpp"
#include "mmi/metrics.hpp"
#include "mmi/optimizer.hpp"
#include "mmi/report.hpp"

namespace mmi {

inline constexpr const char* version_string = "0.1.0";

}  // namespace mmi
