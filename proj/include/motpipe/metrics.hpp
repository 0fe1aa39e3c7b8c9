#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "motpipe/geometry.hpp"

namespace motpipe {

struct EvalConfig {
    double match_iou_min = 0.5;
    std::set<int> consider_categories = {1};
    double min_visibility = 0.0;
};

// One identified box within a frame; used for both ground truth and hypotheses.
struct IdBox {
    int id = 0;
    BBox bbox;
};

using FrameBoxes = std::map<int, std::vector<IdBox>>;  // frame -> boxes

struct EvalCounts {
    long long gt = 0;
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long idsw = 0;
    long long idtp = 0;
    long long idfp = 0;
    long long idfn = 0;
};

struct SequenceEval {
    std::string sequence;
    EvalCounts counts;
    std::optional<double> mota;  // absent when there is no ground truth
    double idf1 = 1.0;
    double idp = 1.0;
    double idr = 1.0;
    double precision = 1.0;
    double recall = 1.0;
};

// CLEAR matching for one frame. Pairs matched in an earlier frame and still
// feasible are kept before the remainder is assigned optimally; a ground-truth
// identity matched to a different hypothesis id than its last known match
// counts an id switch.
struct FrameMatches {
    std::vector<std::pair<int, int>> pairs;  // (gt id, hyp id), sorted
    int fp = 0;
    int fn = 0;
    int idsw = 0;
};
FrameMatches match_frame(const std::vector<IdBox>& gt, const std::vector<IdBox>& hyp,
                         const std::map<int, int>& last_match, double iou_min);

// 1 - (fn + fp + idsw)/gt; absent when gt == 0. May be negative; never clamped.
std::optional<double> mota(const EvalCounts& counts);

// Global identity assignment maximizing jointly covered frames; returns
// (idtp, idfp, idfn) alongside the score.
struct IdScores {
    long long idtp = 0;
    long long idfp = 0;
    long long idfn = 0;
    double idf1 = 1.0;
    double idp = 1.0;
    double idr = 1.0;
};
using Trajectories = std::map<int, std::map<int, BBox>>;  // id -> frame -> box
IdScores idf1(const Trajectories& gt, const Trajectories& hyp, double iou_min);

std::pair<double, double> precision_recall(const EvalCounts& counts);

Trajectories to_trajectories(const FrameBoxes& boxes);

SequenceEval evaluate_sequence(const std::string& name, const FrameBoxes& gt,
                               const FrameBoxes& hyp, const EvalConfig& cfg);

// Sums counts across sequences, then recomputes every ratio from the sums.
SequenceEval aggregate(const std::vector<SequenceEval>& evals);

// CSV with a header row; one row per sequence plus an AGGREGATE row when more
// than one sequence is present. Ratios carry 6 decimal places.
std::string write_report_csv(const std::vector<SequenceEval>& evals);

}  // namespace motpipe
