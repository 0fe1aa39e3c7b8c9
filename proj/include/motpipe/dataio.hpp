#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "motpipe/detection.hpp"
#include "motpipe/metrics.hpp"

namespace motpipe {

struct SequenceMeta {
    std::string name;
    double frame_rate = 30.0;
    int seq_length = 1;
    int im_width = 1;
    int im_height = 1;
};

// One output row of a tracking run, in MOT submission layout.
struct TrackRow {
    int frame = 0;
    int id = 0;
    BBox bbox;
    double confidence = 1.0;
};

struct GtRow {
    int frame = 0;
    int id = 0;
    BBox bbox;
    int active = 1;
    int category = 1;
    double visibility = 1.0;
};

struct DetRow {
    int frame = 0;
    BBox bbox;
    double confidence = 1.0;
};

struct EmbedRow {
    int frame = 0;
    int det_idx = 0;
    std::vector<double> values;
};

struct DepthRow {
    int frame = 0;
    int det_idx = 0;
    double rel_depth = 0.0;
};

struct PoseRow {
    int frame = 0;
    int det_idx = 0;
    std::array<Keypoint, kNumKeypoints> keypoints{};
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    explicit ParseError(const std::string& message) : std::runtime_error(message), line_(0) {}
    int line() const { return line_; }  // 1-based; 0 when not tied to a line

private:
    int line_;
};

SequenceMeta parse_seqinfo(const std::string& text);

struct DetParse {
    std::map<int, std::vector<Detection>> by_frame;
    int dropped = 0;  // rows discarded for non-positive extent
};
DetParse parse_det(const std::string& text);

FrameBoxes parse_gt(const std::string& text, const EvalConfig& cfg);

struct TrackParse {
    std::vector<TrackRow> rows;
    int dropped = 0;
};
TrackParse parse_tracks(const std::string& text);

// Joins cue sidecars onto parsed detections by (frame, 0-based detection
// index within the frame). Embeddings are re-normalized to unit norm; depth
// is clamped to [0,1]. Rows pointing at no detection are discarded.
struct SidecarStats {
    int unmatched = 0;
    int clamped = 0;
};
SidecarStats attach_sidecars(std::map<int, std::vector<Detection>>& dets,
                             const std::optional<std::string>& embed_text,
                             const std::optional<std::string>& depth_text,
                             const std::optional<std::string>& pose_text);

std::string write_seqinfo(const SequenceMeta& meta);
std::string write_tracks(std::vector<TrackRow> rows);
std::string write_gt(const std::vector<GtRow>& rows);
std::string write_det(const std::vector<DetRow>& rows);
std::string write_embed(const std::vector<EmbedRow>& rows);
std::string write_depth(const std::vector<DepthRow>& rows);
std::string write_pose(const std::vector<PoseRow>& rows);

FrameBoxes track_rows_to_frames(const std::vector<TrackRow>& rows);

// Locale-independent fixed-point formatting (period decimal marker).
std::string format_fixed(double value, int decimals);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace motpipe
