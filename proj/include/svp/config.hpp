#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "svp/caliper.hpp"
#include "svp/pulse.hpp"
#include "svp/segment.hpp"
#include "svp/skeleton.hpp"

namespace svp {

// One parsed `key = value` line.
struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

// A `[name]` block and its entries; sections may repeat.
struct ConfigSection {
    std::string name;
    std::vector<ConfigEntry> entries;
    int line = 0;
};

// Flat INI-style format: [section] headers, key = value lines, '#'
// comments, blank lines ignored. Throws ParseError with the line number.
std::vector<ConfigSection> parse_config_text(const std::string& text);
std::vector<ConfigSection> parse_config_file(const std::filesystem::path& path);

// Everything tunable in one place; serialized into run manifests.
struct PipelineConfig {
    SegmentationParams seg;
    SkeletonParams skeleton;
    CaliperParams caliper;
    PulseParams pulse;
    std::uint64_t seed = 0;
};

// Defaults above, overridden by the file when given. Unknown sections or
// keys and out-of-range values throw ValidationError with a field path.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
PipelineConfig pipeline_config_from_sections(const std::vector<ConfigSection>& sections);

// Canonical text form (round-trips through the parser).
std::string pipeline_config_to_text(const PipelineConfig& config);

// Shared numeric parsing with field-path errors.
int config_int(const std::string& section, const ConfigEntry& e);
double config_double(const std::string& section, const ConfigEntry& e);

}  // namespace svp
