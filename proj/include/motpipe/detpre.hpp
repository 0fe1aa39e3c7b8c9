#pragma once

#include <vector>

#include "motpipe/detection.hpp"

namespace motpipe {

struct DetPreConfig {
    double base_threshold = 0.6;
    double softnms_sigma = 0.5;
    double softnms_min_score = 0.05;
    bool adaptive_enabled = false;
    double adaptive_floor = 0.4;
    double adaptive_ceiling = 0.7;
    double adaptive_ema_alpha = 0.1;
};

// Keeps exactly the detections with confidence >= threshold, order preserved.
std::vector<Detection> filter_confidence(const std::vector<Detection>& dets, double threshold);

// Gaussian-decay Soft-NMS. Repeatedly selects the highest-score remaining
// detection (ties broken by lower input index) and rescales every other
// remaining score by exp(-iou^2 / sigma) against it. Detections whose decayed
// score falls below min_score are dropped. Returned confidences are the
// decayed scores, in descending order.
std::vector<Detection> soft_nms(const std::vector<Detection>& dets, double sigma, double min_score);

// Dynamic confidence threshold: base_threshold rescaled by the EMA of the
// per-frame mean raw confidence against a 0.8 reference point, clamped to
// [adaptive_floor, adaptive_ceiling]. Returns base_threshold when disabled.
double adaptive_threshold(double ema_mean_conf, const DetPreConfig& cfg);

}  // namespace motpipe
