#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "motpipe/dataio.hpp"

namespace motpipe {

struct Occlusion {
    int ped = 1;       // pedestrian id as written to gt, 1-based
    int start = 1;     // first occluded frame, 1-based
    int duration = 1;  // frames
};

struct SynthConfig {
    std::uint64_t seed = 1;
    int n_peds = 10;
    int n_frames = 100;
    int im_width = 1920;
    int im_height = 1080;
    double vel_std = 0.0;        // per-frame velocity perturbation, px
    double det_noise_std = 0.0;  // detection coordinate noise, px
    double miss_rate = 0.0;
    double clutter_rate = 0.0;  // expected false detections per frame
    int embed_dim = 128;
    double embed_noise_std = 0.0;
    std::vector<Occlusion> occlusions;
    bool depth_lanes = false;

    void validate() const;  // throws std::invalid_argument listing violations
};

struct SynthScene {
    SequenceMeta meta;
    std::vector<GtRow> gt;
    std::vector<DetRow> det;
    std::vector<EmbedRow> embed;
    std::vector<DepthRow> depth;
    std::vector<PoseRow> pose;
};

SynthScene generate(const SynthConfig& cfg);

// Lays the scene out as a sequence directory: seqinfo.ini, gt/gt.txt,
// det/det.txt, embed.csv, depth.csv, pose.csv.
void write_scene(const SynthScene& scene, const std::filesystem::path& dir);

// In-memory equivalents of writing the scene and parsing it back.
std::map<int, std::vector<Detection>> scene_detections(const SynthScene& scene);
FrameBoxes scene_gt(const SynthScene& scene, double min_visibility = 0.0);

}  // namespace motpipe
