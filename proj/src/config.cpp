#include "svp/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace svp {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_field(const std::string& section, const ConfigEntry& e,
                            const std::string& why) {
    throw ValidationError("[" + section + "]." + e.key + ": " + why + " (got '" + e.value + "')");
}

}  // namespace

std::vector<ConfigSection> parse_config_text(const std::string& text) {
    std::vector<ConfigSection> sections;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated section header", line_no);
            ConfigSection s;
            s.name = trim(line.substr(1, line.size() - 2));
            s.line = line_no;
            if (s.name.empty())
                throw ParseError("empty section name", line_no);
            sections.push_back(std::move(s));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", line_no);
        if (sections.empty())
            throw ParseError("key before any [section]", line_no);
        ConfigEntry e;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = line_no;
        if (e.key.empty())
            throw ParseError("empty key", line_no);
        sections.back().entries.push_back(std::move(e));
    }
    return sections;
}

std::vector<ConfigSection> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

int config_int(const std::string& section, const ConfigEntry& e) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(e.value.c_str(), &end, 10);
    if (errno || end == e.value.c_str() || *end != '\0')
        bad_field(section, e, "expected an integer");
    return int(v);
}

double config_double(const std::string& section, const ConfigEntry& e) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (errno || end == e.value.c_str() || *end != '\0')
        bad_field(section, e, "expected a number");
    return v;
}

PipelineConfig pipeline_config_from_sections(const std::vector<ConfigSection>& sections) {
    PipelineConfig cfg;
    for (const auto& s : sections) {
        for (const auto& e : s.entries) {
            auto as_int = [&] { return config_int(s.name, e); };
            auto as_double = [&] { return config_double(s.name, e); };
            auto positive_odd = [&](int v) {
                if (v < 3 || v % 2 == 0) bad_field(s.name, e, "expected an odd size >= 3");
                return v;
            };
            if (s.name == "segment") {
                if (e.key == "clahe_grid") cfg.seg.clahe_grid = as_int();
                else if (e.key == "clahe_clip") cfg.seg.clahe_clip = as_double();
                else if (e.key == "median_size") cfg.seg.median_size = positive_odd(as_int());
                else if (e.key == "gaussian_size") cfg.seg.gaussian_size = positive_odd(as_int());
                else if (e.key == "global_threshold") cfg.seg.global_threshold = as_int();
                else if (e.key == "min_blob_area") cfg.seg.min_blob_area = as_int();
                else if (e.key == "fov_threshold") cfg.seg.fov_threshold = as_int();
                else if (e.key == "fov_erode_radius") cfg.seg.fov_erode_radius = as_int();
                else bad_field(s.name, e, "unknown key");
            } else if (s.name == "skeleton") {
                if (e.key == "gap_se_length") cfg.skeleton.gap_se_length = as_int();
                else if (e.key == "spur_length") cfg.skeleton.spur_length = as_int();
                else if (e.key == "prune_length") cfg.skeleton.prune_length = as_int();
                else bad_field(s.name, e, "unknown key");
            } else if (s.name == "caliper") {
                if (e.key == "normal_factor") cfg.caliper.normal_factor = as_double();
                else if (e.key == "kmeans_max_iter") cfg.caliper.kmeans_max_iter = as_int();
                else if (e.key == "kmeans_tol") cfg.caliper.kmeans_tol = as_double();
                else if (e.key == "row_join") cfg.caliper.row_join = as_int();
                else if (e.key == "count_mode") {
                    if (e.value == "center_run") cfg.caliper.count_mode = CountMode::CenterRun;
                    else if (e.value == "total") cfg.caliper.count_mode = CountMode::Total;
                    else bad_field(s.name, e, "expected center_run or total");
                } else bad_field(s.name, e, "unknown key");
            } else if (s.name == "pulse") {
                if (e.key == "sg_window") cfg.pulse.sg_window = positive_odd(as_int());
                else if (e.key == "sg_order") cfg.pulse.sg_order = as_int();
                else if (e.key == "lowpass_hz") cfg.pulse.lowpass_hz = as_double();
                else if (e.key == "lowpass_taps") cfg.pulse.lowpass_taps = positive_odd(as_int());
                else if (e.key == "fps") cfg.pulse.fps = as_double();
                else if (e.key == "click_radius") cfg.pulse.click_radius = as_double();
                else if (e.key == "carry_radius") cfg.pulse.carry_radius = as_double();
                else if (e.key == "rate_formula") {
                    if (e.value == "double_separation")
                        cfg.pulse.formula = RateFormula::DoubleSeparation;
                    else if (e.value == "single_separation")
                        cfg.pulse.formula = RateFormula::SingleSeparation;
                    else bad_field(s.name, e, "expected double_separation or single_separation");
                } else bad_field(s.name, e, "unknown key");
            } else if (s.name == "run") {
                if (e.key == "seed") cfg.seed = std::uint64_t(config_int(s.name, e));
                else bad_field(s.name, e, "unknown key");
            } else {
                throw ValidationError("[" + s.name + "]: unknown section");
            }
        }
    }
    if (cfg.pulse.sg_order >= cfg.pulse.sg_window)
        throw ValidationError("[pulse].sg_order: must be smaller than sg_window");
    if (cfg.pulse.fps <= 0)
        throw ValidationError("[pulse].fps: must be positive");
    return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    try {
        return pipeline_config_from_sections(parse_config_file(path));
    } catch (const ParseError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string pipeline_config_to_text(const PipelineConfig& c) {
    std::ostringstream out;
    out << "[segment]\n"
        << "clahe_grid = " << c.seg.clahe_grid << "\n"
        << "clahe_clip = " << c.seg.clahe_clip << "\n"
        << "median_size = " << c.seg.median_size << "\n"
        << "gaussian_size = " << c.seg.gaussian_size << "\n"
        << "global_threshold = " << c.seg.global_threshold << "\n"
        << "min_blob_area = " << c.seg.min_blob_area << "\n"
        << "fov_threshold = " << c.seg.fov_threshold << "\n"
        << "fov_erode_radius = " << c.seg.fov_erode_radius << "\n\n"
        << "[skeleton]\n"
        << "gap_se_length = " << c.skeleton.gap_se_length << "\n"
        << "spur_length = " << c.skeleton.spur_length << "\n"
        << "prune_length = " << c.skeleton.prune_length << "\n\n"
        << "[caliper]\n"
        << "normal_factor = " << c.caliper.normal_factor << "\n"
        << "kmeans_max_iter = " << c.caliper.kmeans_max_iter << "\n"
        << "kmeans_tol = " << c.caliper.kmeans_tol << "\n"
        << "row_join = " << c.caliper.row_join << "\n"
        << "count_mode = "
        << (c.caliper.count_mode == CountMode::CenterRun ? "center_run" : "total") << "\n\n"
        << "[pulse]\n"
        << "sg_window = " << c.pulse.sg_window << "\n"
        << "sg_order = " << c.pulse.sg_order << "\n"
        << "lowpass_hz = " << c.pulse.lowpass_hz << "\n"
        << "lowpass_taps = " << c.pulse.lowpass_taps << "\n"
        << "fps = " << c.pulse.fps << "\n"
        << "click_radius = " << c.pulse.click_radius << "\n"
        << "carry_radius = " << c.pulse.carry_radius << "\n"
        << "rate_formula = "
        << (c.pulse.formula == RateFormula::DoubleSeparation ? "double_separation"
                                                             : "single_separation")
        << "\n\n"
        << "[run]\n"
        << "seed = " << c.seed << "\n";
    return out.str();
}

}  // namespace svp
