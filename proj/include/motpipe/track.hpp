#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "motpipe/kalman.hpp"

namespace motpipe {

enum class TrackStatus { Tentative, Confirmed, Deleted };

// A persistent pedestrian identity. Public ids are assigned in
// first-confirmation order; a Tentative track has id 0 until confirmed.
struct Track {
    int id = 0;
    KalmanState state;
    TrackStatus status = TrackStatus::Tentative;
    int hits = 1;
    int time_since_update = 0;
    std::deque<std::vector<double>> gallery;  // ring buffer, <= nn_budget entries
    std::optional<double> depth_ema;
    double last_visibility = 1.0;

    bool confirmed() const { return status == TrackStatus::Confirmed; }
    bool deleted() const { return status == TrackStatus::Deleted; }

    BBox predicted_box() const { return state.to_bbox(); }

    void push_embedding(const std::vector<double>& embedding, int nn_budget) {
        gallery.push_back(embedding);
        while (static_cast<int>(gallery.size()) > nn_budget) {
            gallery.pop_front();
        }
    }
};

}  // namespace motpipe
