#pragma once

#include <string>
#include <vector>

#include "motpipe/synth.hpp"
#include "motpipe/tracker.hpp"

namespace motpipe {

// Flat key=value configuration text: one pair per line, '#' starts a comment,
// blank lines ignored. Keys may repeat only where the target field is a list.
struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

std::vector<ConfigEntry> parse_config_text(const std::string& text);

// Apply entries onto a config. Unknown keys and unparsable values are
// collected and reported together in one std::invalid_argument.
void apply_tracker_config(TrackerConfig& cfg, const std::vector<ConfigEntry>& entries);
void apply_synth_config(SynthConfig& cfg, const std::vector<ConfigEntry>& entries);

// The tracker config as flat key=value pairs, in a fixed order (every key
// apply_tracker_config accepts).
std::vector<std::pair<std::string, std::string>> tracker_config_items(const TrackerConfig& cfg);

}  // namespace motpipe
