#pragma once

#include <map>
#include <optional>
#include <vector>

#include "motpipe/assoc.hpp"
#include "motpipe/dataio.hpp"
#include "motpipe/detpre.hpp"
#include "motpipe/kalman.hpp"
#include "motpipe/track.hpp"

namespace motpipe {

struct TrackerConfig {
    DetPreConfig detpre;
    AssocConfig assoc;
    KalmanConfig kalman;
    int n_init = 3;
    int max_age = 50;
    int nn_budget = 150;
    bool output_smoothing = true;
    double depth_ema_alpha = 0.3;

    void validate() const;  // throws std::invalid_argument on bad values
};

class Tracker {
public:
    explicit Tracker(const TrackerConfig& cfg = {});

    // Advances one frame: predict, detection post-processing, cascade,
    // lifecycle updates. Returns the rows to emit for this frame (confirmed
    // tracks matched this frame). Frames must strictly increase.
    std::vector<TrackRow> step(int frame, const std::vector<Detection>& raw_dets);

    const std::vector<Track>& tracks() const { return tracks_; }
    const TrackerConfig& config() const { return cfg_; }
    std::optional<double> ema_mean_conf() const { return ema_mean_conf_; }

private:
    TrackerConfig cfg_;
    KalmanFilter filter_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
    int last_frame_ = 0;
    std::optional<double> ema_mean_conf_;
};

// Batch driver: runs every frame from 1 to the last detection frame and
// returns output rows sorted by (frame, id). Warns (stderr) when the
// detection span disagrees with meta.seq_length, then proceeds.
std::vector<TrackRow> run_sequence(const std::map<int, std::vector<Detection>>& dets_by_frame,
                                   const SequenceMeta& meta, const TrackerConfig& cfg);

}  // namespace motpipe
