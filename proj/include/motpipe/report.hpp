#pragma once

#include <string>
#include <vector>

#include "motpipe/metrics.hpp"

namespace motpipe {

// Grouped bar chart, one group per sequence with IDF1, MOTA and Precision
// bars on a [0,1] axis. Fixed 800x400 viewBox, no external dependencies.
// Negative MOTA renders as an empty bar (the axis does not extend below 0].
std::string render_report_svg(const std::vector<SequenceEval>& evals);

}  // namespace motpipe
