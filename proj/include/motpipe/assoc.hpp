#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "motpipe/detection.hpp"
#include "motpipe/track.hpp"

namespace motpipe {

// Sentinel cost for pairs a valid assignment must never keep. Finite so
// rectangular solves stay numerically safe; sentinel matches are discarded
// after the solve.
inline constexpr double kInfeasible = 1e5;

struct AssocConfig {
    double max_iou_distance = 0.7;
    double appearance_threshold = 0.2;  // cosine distance gate
    double depth_weight = 0.0;          // 0 = depth cue off
    double depth_gate = 0.2;            // max allowed |delta rel_depth|
    double pose_visibility_min = 0.3;   // below this, gallery updates are suppressed
    double keypoint_conf_min = 0.5;     // per-keypoint confidence cutoff
    bool use_giou = false;
};

// Dense track x detection cost matrix (row-major).
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> cost;  // rows * cols entries

    static CostMatrix filled(int rows, int cols, double value) {
        return {rows, cols, std::vector<double>(static_cast<size_t>(rows) * cols, value)};
    }
    double& at(int r, int c) { return cost[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return cost[static_cast<size_t>(r) * cols + c]; }
};

struct AssignmentResult {
    std::vector<std::pair<int, int>> matches;  // (row, col), sorted by row
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
};

// Smallest cosine distance (1 - dot) between the query and any gallery entry.
// kInfeasible when the gallery is empty.
double cosine_distance(const std::vector<std::vector<double>>& gallery,
                       const std::vector<double>& query);

// cost[i][j] = 1 - iou (or (1 - giou)/2 when use_giou), kInfeasible above
// max_iou_distance.
CostMatrix iou_cost(const std::vector<BBox>& track_boxes, const std::vector<BBox>& det_boxes,
                    bool use_giou, double max_iou_distance);

// Additive depth term: depth_weight * |track_depth - det_depth|, kInfeasible
// when the gap exceeds depth_gate. Missing depth on either side disables the
// cue for that pair (term 0).
double depth_cost_term(std::optional<double> track_depth, std::optional<double> det_depth,
                       double depth_weight, double depth_gate);

// Fraction of the 17 keypoints with conf >= conf_min; 1.0 when keypoints are
// absent (cue disabled). Throws std::invalid_argument unless exactly 17.
double pose_visibility(const std::optional<std::vector<Keypoint>>& keypoints, double conf_min);

// Minimum-total-cost one-to-one assignment over a rectangular matrix.
// Pairs at the kInfeasible sentinel are dropped and reported unmatched.
// Cost ties are canonicalized toward the lexicographically smallest
// (row, col) pair set.
AssignmentResult solve_assignment(const CostMatrix& costs);

struct CascadeResult {
    std::vector<std::pair<int, int>> matches;  // (track index, detection index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;
};

// DeepSORT matching cascade: appearance+depth assignment per track age
// (most recent first, Mahalanobis- and appearance-gated) over confirmed
// tracks, then an IoU round over unconfirmed tracks and age-1 leftovers.
CascadeResult matching_cascade(const std::vector<Track>& tracks,
                               const std::vector<Detection>& detections,
                               const AssocConfig& cfg, const KalmanFilter& filter, int max_age);

}  // namespace motpipe
