#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "motpipe/assoc.hpp"
#include "motpipe/dataio.hpp"
#include "motpipe/detection.hpp"
#include "motpipe/metrics.hpp"
#include "motpipe/tracker.hpp"

namespace testutil {

// Exhaustive minimum over all full assignments of the smaller side.
inline double brute_force_assignment_total(const motpipe::CostMatrix& m) {
    const bool wide = m.rows <= m.cols;
    const int k = wide ? m.rows : m.cols;
    const int n = wide ? m.cols : m.rows;
    if (k == 0) return 0.0;
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int i = 0; i < k; ++i) {
            total += wide ? m.at(i, perm[static_cast<size_t>(i)])
                          : m.at(perm[static_cast<size_t>(i)], i);
        }
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Total cost of a solve_assignment result over the full assignment, counting
// dropped sentinel pairs at the sentinel value.
inline double assignment_total(const motpipe::CostMatrix& m,
                               const motpipe::AssignmentResult& result) {
    double total = 0.0;
    for (const auto& [r, c] : result.matches) total += m.at(r, c);
    const int full = std::min(m.rows, m.cols);
    total += motpipe::kInfeasible * (full - static_cast<int>(result.matches.size()));
    return total;
}

// Exhaustive best identity pairing for the ID measures.
inline long long brute_force_idtp(const motpipe::Trajectories& gt,
                                  const motpipe::Trajectories& hyp, double iou_min) {
    std::vector<const std::map<int, motpipe::BBox>*> gts, hyps;
    for (const auto& [id, t] : gt) gts.push_back(&t);
    for (const auto& [id, t] : hyp) hyps.push_back(&t);
    const int R = static_cast<int>(gts.size());
    const int C = static_cast<int>(hyps.size());
    if (R == 0 || C == 0) return 0;

    std::vector<long long> overlap(static_cast<size_t>(R) * static_cast<size_t>(C), 0);
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
            long long n = 0;
            for (const auto& [frame, box] : *gts[static_cast<size_t>(r)]) {
                const auto h = hyps[static_cast<size_t>(c)]->find(frame);
                if (h != hyps[static_cast<size_t>(c)]->end() &&
                    motpipe::iou(box, h->second) >= iou_min) {
                    ++n;
                }
            }
            overlap[static_cast<size_t>(r) * static_cast<size_t>(C) + static_cast<size_t>(c)] = n;
        }
    }

    const bool wide = R <= C;
    const int k = wide ? R : C;
    const int n = wide ? C : R;
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    long long best = 0;
    do {
        long long total = 0;
        for (int i = 0; i < k; ++i) {
            const int r = wide ? i : perm[static_cast<size_t>(i)];
            const int c = wide ? perm[static_cast<size_t>(i)] : i;
            total += overlap[static_cast<size_t>(r) * static_cast<size_t>(C) + static_cast<size_t>(c)];
        }
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Hard NMS reference: any positive overlap with a selected box suppresses.
inline std::vector<motpipe::Detection> hard_nms(const std::vector<motpipe::Detection>& dets,
                                                double min_score) {
    std::vector<motpipe::Detection> out;
    std::vector<char> alive(dets.size(), 1);
    while (true) {
        int best = -1;
        for (size_t i = 0; i < dets.size(); ++i) {
            if (alive[i] && (best < 0 || dets[i].confidence > dets[static_cast<size_t>(best)].confidence)) {
                best = static_cast<int>(i);
            }
        }
        if (best < 0 || dets[static_cast<size_t>(best)].confidence < min_score) break;
        out.push_back(dets[static_cast<size_t>(best)]);
        alive[static_cast<size_t>(best)] = 0;
        for (size_t i = 0; i < dets.size(); ++i) {
            if (alive[i] && motpipe::iou(dets[i].bbox, dets[static_cast<size_t>(best)].bbox) > 0.0) {
                alive[i] = 0;
            }
        }
    }
    return out;
}

inline std::vector<double> unit_vec(int dim, int axis) {
    std::vector<double> v(static_cast<size_t>(dim), 0.0);
    v[static_cast<size_t>(axis)] = 1.0;
    return v;
}

inline std::vector<motpipe::Keypoint> keypoints_with_conf(const motpipe::BBox& box, double conf) {
    std::vector<motpipe::Keypoint> kps(static_cast<size_t>(motpipe::kNumKeypoints));
    for (int k = 0; k < motpipe::kNumKeypoints; ++k) {
        kps[static_cast<size_t>(k)].x = box.left + box.width * (0.1 + 0.05 * k);
        kps[static_cast<size_t>(k)].y = box.top + box.height * (0.1 + 0.04 * k);
        kps[static_cast<size_t>(k)].conf = conf;
    }
    return kps;
}

struct Scenario {
    std::map<int, std::vector<motpipe::Detection>> dets;
    motpipe::FrameBoxes gt;
};

// Two pedestrians approach head-on, meet at frame 20 and bounce back.
// Identical appearance embeddings; depth lanes 0.25 / 0.75; per-frame
// detection order shuffled so cost ties cannot fall back on input order.
inline Scenario crossing_scene(std::uint64_t seed) {
    Scenario s;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 0.5);
    const auto emb = unit_vec(8, 0);
    const double w = 60.0, h = 140.0;
    const int meet = 20;
    for (int f = 1; f <= 40; ++f) {
        const double ax = f <= meet ? 272.0 + 12.0 * f : 512.0 - 12.0 * (f - meet);
        const double bx = f <= meet ? 752.0 - 12.0 * f : 512.0 + 12.0 * (f - meet);
        const motpipe::BBox a_box{ax - w / 2.0, 300.0 - h / 2.0, w, h};
        const motpipe::BBox b_box{bx - w / 2.0, 310.0 - h / 2.0, w, h};
        s.gt[f].push_back(motpipe::IdBox{1, a_box});
        s.gt[f].push_back(motpipe::IdBox{2, b_box});

        motpipe::Detection da;
        da.frame = f;
        da.bbox = a_box.translated(jitter(rng), jitter(rng));
        da.confidence = 0.9;
        da.embedding = emb;
        da.rel_depth = 0.25;
        motpipe::Detection db;
        db.frame = f;
        db.bbox = b_box.translated(jitter(rng), jitter(rng));
        db.confidence = 0.9;
        db.embedding = emb;
        db.rel_depth = 0.75;

        if (rng() & 1ULL) {
            s.dets[f] = {db, da};
        } else {
            s.dets[f] = {da, db};
        }
    }
    return s;
}

// One pedestrian walks right; frames 16-20 its appearance flips to an
// occluder signature with near-zero keypoint confidence, frames 21-40 it is
// fully occluded while a stationary clutter source with that signature sits
// near the occlusion point, and from frame 41 it reappears on path.
inline Scenario pollution_scene(std::uint64_t seed) {
    Scenario s;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 0.5);
    const auto own = unit_vec(8, 0);
    const auto occluder = unit_vec(8, 1);
    const double w = 60.0, h = 140.0;
    const int occ_start = 21, occ_end = 40;  // inclusive
    for (int f = 1; f <= 60; ++f) {
        const double cx = 100.0 + 5.0 * f;
        const motpipe::BBox box{cx - w / 2.0, 300.0 - h / 2.0, w, h};
        const bool occluded = f >= occ_start && f <= occ_end;
        motpipe::IdBox gt_box{1, box};
        if (!occluded) {
            s.gt[f].push_back(gt_box);
        }
        // Occluded ground truth is still written, but with zero visibility
        // the caller's eval config (min_visibility 0.1) excludes it; keeping
        // the map free of those rows models the same filter here.

        if (!occluded) {
            motpipe::Detection d;
            d.frame = f;
            d.bbox = box.translated(jitter(rng), jitter(rng));
            d.confidence = 0.9;
            const bool degraded = f >= occ_start - 5 && f < occ_start;
            d.embedding = degraded ? occluder : own;
            d.keypoints = keypoints_with_conf(d.bbox, degraded ? 0.1 : 0.9);
            s.dets[f].push_back(std::move(d));
        }
        if (f >= occ_start + 1 && f <= occ_end) {
            // Clutter parked where the pedestrian vanished (frame 20 position),
            // starting one frame late so the age-1 IoU fallback never sees it.
            const double clutter_cx = 100.0 + 5.0 * 20.0 + jitter(rng);
            motpipe::Detection d;
            d.frame = f;
            d.bbox = motpipe::BBox{clutter_cx - w / 2.0, 300.0 - h / 2.0 + jitter(rng), w, h};
            d.confidence = 0.9;
            d.embedding = occluder;
            d.keypoints = keypoints_with_conf(d.bbox, 0.9);
            s.dets[f].push_back(std::move(d));
        }
    }
    return s;
}

inline motpipe::FrameBoxes run_tracker(const std::map<int, std::vector<motpipe::Detection>>& dets,
                                       const motpipe::TrackerConfig& cfg, int last_frame) {
    motpipe::Tracker tracker(cfg);
    std::vector<motpipe::TrackRow> rows;
    static const std::vector<motpipe::Detection> kEmpty;
    for (int f = 1; f <= last_frame; ++f) {
        const auto it = dets.find(f);
        auto out = tracker.step(f, it == dets.end() ? kEmpty : it->second);
        rows.insert(rows.end(), out.begin(), out.end());
    }
    return motpipe::track_rows_to_frames(rows);
}

}  // namespace testutil
