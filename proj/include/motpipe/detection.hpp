#pragma once

#include <optional>
#include <vector>

#include "motpipe/geometry.hpp"

namespace motpipe {

inline constexpr int kNumKeypoints = 17;

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double conf = 0.0;
};

// One candidate pedestrian in one frame. Embedding, depth and pose are
// optional sidecar cues; an embedding, when present, is unit-norm.
struct Detection {
    int frame = 0;  // 1-based
    BBox bbox;
    double confidence = 0.0;
    int category = 1;
    std::vector<double> embedding;                        // empty = absent
    std::optional<double> rel_depth;                      // [0,1], 0 = nearest
    std::optional<std::vector<Keypoint>> keypoints;       // exactly 17 when present

    bool has_embedding() const { return !embedding.empty(); }
};

}  // namespace motpipe
