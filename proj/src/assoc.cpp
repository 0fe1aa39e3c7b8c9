#include "motpipe/assoc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace motpipe {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine_distance: dimension mismatch");
    }
    return Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()))
        .dot(Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())));
}

// Jonker-Volgenant shortest augmenting path over a rows <= cols matrix.
// Returns col index per row. Deterministic scan order.
std::vector<int> solve_wide(const CostMatrix& m) {
    const int n = m.rows;
    const int w = m.cols;
    std::vector<double> u(n + 1, 0.0), v(w + 1, 0.0), minv(w + 1);
    std::vector<int> matched_row(w + 1, 0), way(w + 1, 0);

    for (int i = 1; i <= n; ++i) {
        matched_row[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), std::numeric_limits<double>::infinity());
        std::vector<char> used(w + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = matched_row[j0];
            int j1 = 0;
            double delta = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= w; ++j) {
                if (used[j]) continue;
                const double cur = m.at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= w; ++j) {
                if (used[j]) {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (matched_row[j0] != 0);
        do {
            const int j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= w; ++j) {
        if (matched_row[j] != 0) {
            col_of_row[matched_row[j] - 1] = j - 1;
        }
    }
    return col_of_row;
}

// Rewrites an optimal assignment into the lexicographically smallest
// equal-cost pair set reachable by single-pair moves and pairwise swaps.
void canonicalize_ties(const CostMatrix& m, std::vector<std::pair<int, int>>& matches) {
    std::vector<char> row_used(m.rows, 0), col_used(m.cols, 0);
    for (const auto& [r, c] : matches) {
        row_used[r] = 1;
        col_used[c] = 1;
    }
    std::sort(matches.begin(), matches.end());

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t a = 0; a < matches.size(); ++a) {
            auto& [r1, c1] = matches[a];
            // Move to an earlier unused column at equal cost.
            for (int c = 0; c < c1; ++c) {
                if (!col_used[c] && m.at(r1, c) == m.at(r1, c1)) {
                    col_used[c1] = 0;
                    col_used[c] = 1;
                    c1 = c;
                    changed = true;
                    break;
                }
            }
            // Move to an earlier unused row at equal cost.
            for (int r = 0; r < r1; ++r) {
                if (!row_used[r] && m.at(r, c1) == m.at(r1, c1)) {
                    row_used[r1] = 0;
                    row_used[r] = 1;
                    r1 = r;
                    changed = true;
                    break;
                }
            }
            // Swap columns with a later pair when the totals tie.
            for (size_t b = a + 1; b < matches.size(); ++b) {
                auto& [r2, c2] = matches[b];
                if (c2 < c1 && m.at(r1, c2) + m.at(r2, c1) == m.at(r1, c1) + m.at(r2, c2)) {
                    std::swap(c1, c2);
                    changed = true;
                }
            }
        }
        if (changed) {
            std::sort(matches.begin(), matches.end());
        }
    }
}

}  // namespace

double cosine_distance(const std::vector<std::vector<double>>& gallery,
                       const std::vector<double>& query) {
    if (gallery.empty() || query.empty()) {
        return kInfeasible;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : gallery) {
        best = std::min(best, 1.0 - dot(g, query));
    }
    return best;
}

CostMatrix iou_cost(const std::vector<BBox>& track_boxes, const std::vector<BBox>& det_boxes,
                    bool use_giou, double max_iou_distance) {
    auto m = CostMatrix::filled(static_cast<int>(track_boxes.size()),
                                static_cast<int>(det_boxes.size()), kInfeasible);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) {
            const double c = use_giou ? (1.0 - giou(track_boxes[i], det_boxes[j])) / 2.0
                                      : 1.0 - iou(track_boxes[i], det_boxes[j]);
            m.at(i, j) = c > max_iou_distance ? kInfeasible : c;
        }
    }
    return m;
}

double depth_cost_term(std::optional<double> track_depth, std::optional<double> det_depth,
                       double depth_weight, double depth_gate) {
    if (depth_weight <= 0.0 || !track_depth.has_value() || !det_depth.has_value()) {
        return 0.0;
    }
    const double gap = std::abs(*track_depth - *det_depth);
    if (gap > depth_gate) {
        return kInfeasible;
    }
    return depth_weight * gap;
}

double pose_visibility(const std::optional<std::vector<Keypoint>>& keypoints, double conf_min) {
    if (!keypoints.has_value()) {
        return 1.0;
    }
    if (keypoints->size() != static_cast<size_t>(kNumKeypoints)) {
        throw std::invalid_argument("pose_visibility: expected exactly 17 keypoints");
    }
    int visible = 0;
    for (const auto& kp : *keypoints) {
        if (kp.conf >= conf_min) {
            ++visible;
        }
    }
    return static_cast<double>(visible) / kNumKeypoints;
}

AssignmentResult solve_assignment(const CostMatrix& costs) {
    AssignmentResult result;
    if (costs.rows == 0 || costs.cols == 0) {
        for (int r = 0; r < costs.rows; ++r) result.unmatched_rows.push_back(r);
        for (int c = 0; c < costs.cols; ++c) result.unmatched_cols.push_back(c);
        return result;
    }

    std::vector<std::pair<int, int>> pairs;
    if (costs.rows <= costs.cols) {
        const auto col_of_row = solve_wide(costs);
        for (int r = 0; r < costs.rows; ++r) {
            pairs.emplace_back(r, col_of_row[r]);
        }
    } else {
        CostMatrix t = CostMatrix::filled(costs.cols, costs.rows, 0.0);
        for (int r = 0; r < costs.rows; ++r) {
            for (int c = 0; c < costs.cols; ++c) {
                t.at(c, r) = costs.at(r, c);
            }
        }
        const auto row_of_col = solve_wide(t);
        for (int c = 0; c < costs.cols; ++c) {
            pairs.emplace_back(row_of_col[c], c);
        }
    }

    canonicalize_ties(costs, pairs);

    std::vector<char> row_matched(costs.rows, 0), col_matched(costs.cols, 0);
    for (const auto& [r, c] : pairs) {
        if (costs.at(r, c) >= kInfeasible) {
            continue;  // sentinel pair, forced by matrix shape
        }
        result.matches.emplace_back(r, c);
        row_matched[r] = 1;
        col_matched[c] = 1;
    }
    for (int r = 0; r < costs.rows; ++r) {
        if (!row_matched[r]) result.unmatched_rows.push_back(r);
    }
    for (int c = 0; c < costs.cols; ++c) {
        if (!col_matched[c]) result.unmatched_cols.push_back(c);
    }
    return result;
}

CascadeResult matching_cascade(const std::vector<Track>& tracks,
                               const std::vector<Detection>& detections,
                               const AssocConfig& cfg, const KalmanFilter& filter, int max_age) {
    CascadeResult result;
    std::vector<int> det_pool(detections.size());
    for (size_t i = 0; i < detections.size(); ++i) det_pool[i] = static_cast<int>(i);
    std::vector<char> track_matched(tracks.size(), 0);

    const double gate = filter.config().gate_threshold();

    // Appearance rounds, most recently seen confirmed tracks first.
    for (int age = 1; age <= max_age && !det_pool.empty(); ++age) {
        std::vector<int> round_tracks;
        for (size_t t = 0; t < tracks.size(); ++t) {
            if (tracks[t].confirmed() && tracks[t].time_since_update == age) {
                round_tracks.push_back(static_cast<int>(t));
            }
        }
        if (round_tracks.empty()) {
            continue;
        }

        auto m = CostMatrix::filled(static_cast<int>(round_tracks.size()),
                                    static_cast<int>(det_pool.size()), kInfeasible);
        for (int r = 0; r < m.rows; ++r) {
            const Track& trk = tracks[static_cast<size_t>(round_tracks[r])];
            const std::vector<std::vector<double>> gallery(trk.gallery.begin(), trk.gallery.end());
            for (int c = 0; c < m.cols; ++c) {
                const Detection& det = detections[static_cast<size_t>(det_pool[c])];
                if (filter.gating_distance(trk.state, det.bbox) > gate) {
                    continue;
                }
                const double appearance = cosine_distance(gallery, det.embedding);
                if (appearance > cfg.appearance_threshold) {
                    continue;
                }
                const double depth =
                    depth_cost_term(trk.depth_ema, det.rel_depth, cfg.depth_weight, cfg.depth_gate);
                if (depth >= kInfeasible) {
                    continue;
                }
                m.at(r, c) = appearance + depth;
            }
        }

        const auto round = solve_assignment(m);
        std::vector<char> det_taken(det_pool.size(), 0);
        for (const auto& [r, c] : round.matches) {
            result.matches.emplace_back(round_tracks[r], det_pool[c]);
            track_matched[static_cast<size_t>(round_tracks[r])] = 1;
            det_taken[static_cast<size_t>(c)] = 1;
        }
        std::vector<int> next_pool;
        for (size_t c = 0; c < det_pool.size(); ++c) {
            if (!det_taken[c]) next_pool.push_back(det_pool[c]);
        }
        det_pool = std::move(next_pool);
    }

    // IoU round: unconfirmed tracks plus confirmed age-1 leftovers.
    std::vector<int> iou_tracks;
    for (size_t t = 0; t < tracks.size(); ++t) {
        if (track_matched[t]) continue;
        const bool age1_leftover = tracks[t].confirmed() && tracks[t].time_since_update == 1;
        if (!tracks[t].confirmed() || age1_leftover) {
            iou_tracks.push_back(static_cast<int>(t));
        }
    }
    if (!iou_tracks.empty() && !det_pool.empty()) {
        std::vector<BBox> track_boxes, det_boxes;
        track_boxes.reserve(iou_tracks.size());
        det_boxes.reserve(det_pool.size());
        for (int t : iou_tracks) track_boxes.push_back(tracks[static_cast<size_t>(t)].predicted_box());
        for (int d : det_pool) det_boxes.push_back(detections[static_cast<size_t>(d)].bbox);

        const auto m = iou_cost(track_boxes, det_boxes, cfg.use_giou, cfg.max_iou_distance);
        const auto round = solve_assignment(m);
        std::vector<char> det_taken(det_pool.size(), 0);
        for (const auto& [r, c] : round.matches) {
            result.matches.emplace_back(iou_tracks[r], det_pool[c]);
            track_matched[static_cast<size_t>(iou_tracks[r])] = 1;
            det_taken[static_cast<size_t>(c)] = 1;
        }
        std::vector<int> next_pool;
        for (size_t c = 0; c < det_pool.size(); ++c) {
            if (!det_taken[c]) next_pool.push_back(det_pool[c]);
        }
        det_pool = std::move(next_pool);
    }

    for (size_t t = 0; t < tracks.size(); ++t) {
        if (!track_matched[t]) result.unmatched_tracks.push_back(static_cast<int>(t));
    }
    result.unmatched_detections = std::move(det_pool);
    std::sort(result.matches.begin(), result.matches.end());
    return result;
}

}  // namespace motpipe
