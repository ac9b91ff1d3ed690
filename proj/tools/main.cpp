#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "svp/config.hpp"
#include "svp/errors.hpp"
#include "svp/imageio.hpp"
#include "svp/metrics.hpp"
#include "svp/plot.hpp"
#include "svp/pulse.hpp"
#include "svp/segment.hpp"
#include "svp/skeleton.hpp"
#include "svp/synthgen.hpp"
#include "svp/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flag combinations CLI11 cannot express (exactly-one-of, frame counts);
// mapped to exit 64 alongside CLI11's own parse errors.
struct UsageError {
    std::string message;
};

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt(double v, int precision) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(precision) << v;
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw svp::IoError("cannot write " + path.string());
}

// Finished last so a failed run leaves no manifest behind.
void write_manifest(const fs::path& out_dir, json manifest) {
    manifest["tool"] = svp::kToolName;
    manifest["version"] = svp::kToolVersion;
    write_text(out_dir / "run_manifest.json", manifest.dump(2) + "\n");
}

svp::Point parse_point(const std::string& arg) {
    const auto comma = arg.find(',');
    try {
        if (comma == std::string::npos)
            throw std::invalid_argument("no comma");
        std::size_t nx = 0, ny = 0;
        const std::string xs = arg.substr(0, comma), ys = arg.substr(comma + 1);
        const int x = std::stoi(xs, &nx);
        const int y = std::stoi(ys, &ny);
        if (nx != xs.size() || ny != ys.size())
            throw std::invalid_argument("trailing characters");
        return {x, y};
    } catch (const std::exception&) {
        throw UsageError{"expected integer X,Y, got '" + arg + "'"};
    }
}

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".bmp";
}

std::vector<fs::path> list_images(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw svp::IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && has_image_extension(entry.path()))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

svp::PipelineConfig load_config(const std::string& path) {
    return path.empty() ? svp::PipelineConfig{} : svp::load_pipeline_config(path);
}

svp::GrayImage stack_image(const svp::ProfileStack& stack) {
    svp::GrayImage img(stack.cols, stack.rows);
    double lo = stack.values.front(), hi = stack.values.front();
    for (double v : stack.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo < 1e-12 ? 1.0 : hi - lo;
    for (int r = 0; r < stack.rows; ++r)
        for (int c = 0; c < stack.cols; ++c)
            img.at(c, r) = std::uint8_t(std::lround((stack.at(r, c) - lo) / span * 255.0));
    return img;
}

svp::BinaryMask profile_to_mask(const svp::VesselProfileMask& m) {
    svp::BinaryMask out(m.cols, m.rows);
    out.bits = m.bits;
    return out;
}

// Ground-truth masks arrive as images; anything bright counts as set.
svp::BinaryMask mask_from_image(const svp::RgbImage& img) {
    svp::BinaryMask m(img.width, img.height);
    for (std::size_t i = 0; i < m.bits.size(); ++i)
        m.bits[i] = img.g[i] > 127 ? 1 : 0;
    return m;
}

int run_segment(const std::string& input, const std::string& out, const std::string& config_path,
                bool debug) {
    const svp::PipelineConfig config = load_config(config_path);
    const fs::path out_dir(out);
    fs::create_directories(out_dir);

    json inputs;
    inputs[input] = hash_hex(svp::hash_file(input));
    const svp::RgbImage img = svp::read_image(input);

    svp::SegmentationStages stages;
    const svp::SegmentationResult seg =
        svp::segment_vessels(img, config.seg, debug ? &stages : nullptr);
    const auto paths = svp::extract_centerlines(seg.vessel_mask, config.skeleton);

    svp::write_png(out_dir / "vessel_mask.png", seg.vessel_mask);
    svp::write_png(out_dir / "fov_mask.png", seg.fov_mask);
    svp::write_png(out_dir / "centerline_overlay.png", svp::overlay_centerlines(img, paths));

    std::ostringstream csv;
    csv << "segment,length,loop,start_x,start_y,end_x,end_y\n";
    for (const auto& path : paths) {
        const svp::Point a = path.points.front(), b = path.points.back();
        csv << path.id << ',' << path.points.size() << ',' << (path.loop ? 1 : 0) << ',' << a.x
            << ',' << a.y << ',' << b.x << ',' << b.y << '\n';
    }
    write_text(out_dir / "segments.csv", csv.str());

    if (debug) {
        const fs::path stage_dir = out_dir / "stages";
        fs::create_directories(stage_dir);
        svp::write_png(stage_dir / "01_green.png", stages.green);
        svp::write_png(stage_dir / "02_enhanced.png", stages.enhanced);
        svp::write_png(stage_dir / "03_background_subtracted.png", stages.background_subtracted);
        svp::write_png(stage_dir / "04_thresholded.png", stages.thresholded);
        svp::write_png(stage_dir / "05_cleaned.png", stages.cleaned);
        svp::write_png(stage_dir / "06_vessel_mask.png", seg.vessel_mask);
    }

    json manifest;
    manifest["command"] = "segment";
    manifest["args"] = {{"debug", debug}};
    manifest["config"] = svp::pipeline_config_to_text(config);
    manifest["inputs"] = inputs;
    write_manifest(out_dir, manifest);
    return 0;
}

int run_measure(const std::string& input, const std::string& out, const std::string& config_path,
                const std::string& at, int segment_id, bool debug) {
    if (at.empty() == (segment_id == 0))
        throw UsageError{"exactly one of --at or --segment is required"};
    const svp::PipelineConfig config = load_config(config_path);
    const fs::path out_dir(out);
    fs::create_directories(out_dir);

    json inputs;
    inputs[input] = hash_hex(svp::hash_file(input));
    const svp::RgbImage img = svp::read_image(input);
    const svp::SegmentationResult seg = svp::segment_vessels(img, config.seg);
    const auto paths = svp::extract_centerlines(seg.vessel_mask, config.skeleton);

    svp::Point click{};
    if (!at.empty()) {
        click = parse_point(at);
        const svp::Selection sel = svp::select_nearest(paths, click);
        if (sel.distance > config.pulse.click_radius)
            throw svp::NoVessel("no vessel near point " + at + " (nearest segment is " +
                                fmt(sel.distance, 1) + " px away)");
    } else {
        const auto it = std::find_if(paths.begin(), paths.end(),
                                     [&](const auto& p) { return p.id == segment_id; });
        if (it == paths.end())
            throw svp::NoVessel("no segment with id " + std::to_string(segment_id));
        click = it->points[it->points.size() / 2];
    }

    const svp::GrayImage green = svp::green_channel(img);
    const svp::VesselEstimate est =
        svp::estimate_vessel(green, paths, click, seg.max_diameter, config.caliper);
    const svp::CenterlinePath& path = paths[std::size_t(est.path_index)];
    const auto& widths = est.widths.widths;

    std::ostringstream csv;
    csv << "point,cx,cy,width_px\n";
    for (std::size_t i = 0; i < path.points.size(); ++i)
        csv << i + 1 << ',' << path.points[i].x << ',' << path.points[i].y << ','
            << fmt(widths[i], 3) << '\n';
    write_text(out_dir / "widths.csv", csv.str());
    svp::write_png(out_dir / "profile_stack.png", stack_image(est.stack));
    svp::write_png(out_dir / "repaired_mask.png", profile_to_mask(est.repaired));
    if (debug)
        svp::write_png(out_dir / "clustered_mask.png", profile_to_mask(est.clustered));

    json summary;
    summary["segment"] = path.id;
    summary["points"] = widths.size();
    summary["low_contrast"] = est.clustered.low_contrast;
    summary["mean_width_px"] = std::accumulate(widths.begin(), widths.end(), 0.0) / widths.size();
    summary["min_width_px"] = *std::min_element(widths.begin(), widths.end());
    summary["max_width_px"] = *std::max_element(widths.begin(), widths.end());
    std::cout << summary.dump(2) << "\n";

    json args;
    args["debug"] = debug;
    if (!at.empty())
        args["at"] = at;
    else
        args["segment"] = segment_id;
    json manifest;
    manifest["command"] = "measure";
    manifest["args"] = args;
    manifest["config"] = svp::pipeline_config_to_text(config);
    manifest["inputs"] = inputs;
    write_manifest(out_dir, manifest);
    return 0;
}

int run_track(const std::vector<std::string>& frame_args, const std::vector<std::string>& ats,
              double fps, bool fps_given, const std::string& out,
              const std::string& config_path) {
    svp::PipelineConfig config = load_config(config_path);
    if (fps_given)
        config.pulse.fps = fps;
    const fs::path out_dir(out);
    fs::create_directories(out_dir);

    std::vector<fs::path> frame_paths;
    if (frame_args.size() == 1 && fs::is_directory(frame_args[0])) {
        frame_paths = list_images(frame_args[0]);
    } else {
        for (const auto& a : frame_args) frame_paths.emplace_back(a);
        std::sort(frame_paths.begin(), frame_paths.end());
    }
    if (frame_paths.size() < 2)
        throw UsageError{"need at least two frames, got " + std::to_string(frame_paths.size())};

    json inputs;
    std::vector<svp::RgbImage> frames;
    frames.reserve(frame_paths.size());
    for (const auto& p : frame_paths) {
        inputs[p.string()] = hash_hex(svp::hash_file(p));
        frames.push_back(svp::read_image(p));
    }

    struct ClickResult {
        svp::Point click;
        svp::DiameterSeries raw;
        svp::DiameterSeries smoothed;
        svp::PulseReport report;
    };
    std::vector<ClickResult> results;
    for (const auto& at : ats) {
        ClickResult r;
        r.click = parse_point(at);
        r.raw = svp::track(frames, r.click, config);
        r.smoothed = svp::smooth(r.raw, config.pulse);
        const auto extrema = svp::find_extrema(r.smoothed);
        r.report = svp::heart_rate(extrema, config.pulse.fps, config.pulse.formula);
        results.push_back(std::move(r));
    }

    for (std::size_t i = 0; i < results.size(); ++i) {
        const ClickResult& r = results[i];
        const std::string suffix = results.size() == 1 ? "" : "_" + std::to_string(i + 1);

        std::ostringstream csv;
        csv << "frame,raw_width_px,smoothed_width_px\n";
        for (std::size_t t = 0; t < r.raw.values.size(); ++t)
            csv << t << ',' << fmt(r.raw.values[t], 6) << ',' << fmt(r.smoothed.values[t], 6)
                << '\n';
        write_text(out_dir / ("series" + suffix + ".csv"), csv.str());

        json report;
        report["click"] = {r.click.x, r.click.y};
        report["frames"] = r.raw.values.size();
        report["fps"] = config.pulse.fps;
        report["formula"] = config.pulse.formula == svp::RateFormula::DoubleSeparation
                                ? "double_separation"
                                : "single_separation";
        report["mean_separation_s"] = r.report.mean_separation_s;
        report["period_s"] = r.report.period_s;
        report["heart_rate_bpm"] = r.report.heart_rate_bpm;
        report["bpm_double_separation"] = r.report.bpm_double_separation;
        report["bpm_single_separation"] = r.report.bpm_single_separation;
        json extrema = json::array();
        for (const auto& e : r.report.extrema)
            extrema.push_back({{"frame", e.index},
                               {"kind", e.kind == svp::ExtremumKind::Max ? "max" : "min"}});
        report["extrema"] = extrema;
        write_text(out_dir / ("pulse_report" + suffix + ".json"), report.dump(2) + "\n");

        svp::write_png(out_dir / ("pulse_plot" + suffix + ".png"),
                       svp::plot_pulse(r.raw.values, r.smoothed.values, r.report.extrema));
    }

    json manifest;
    manifest["command"] = "track";
    manifest["args"] = {{"at", ats}, {"fps", config.pulse.fps}};
    manifest["config"] = svp::pipeline_config_to_text(config);
    manifest["inputs"] = inputs;
    write_manifest(out_dir, manifest);
    return 0;
}

int eval_drive(const std::string& drive, const fs::path& out_dir,
               const svp::PipelineConfig& config, json* inputs) {
    const fs::path root(drive);
    const auto images = list_images(root / "images");
    if (images.empty())
        throw svp::IoError("no images under " + (root / "images").string());
    const auto manuals = list_images(root / "manual");
    const bool has_fov = fs::is_directory(root / "fov");
    const auto fovs = has_fov ? list_images(root / "fov") : std::vector<fs::path>{};

    std::ostringstream csv;
    csv << "image,accuracy,sensitivity,specificity\n";
    double sum_acc = 0.0, sum_sen = 0.0, sum_spe = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (i >= manuals.size())
            throw svp::IoError("missing ground truth file for " +
                               images[i].filename().string());
        if (has_fov && i >= fovs.size())
            throw svp::IoError("missing fov mask for " + images[i].filename().string());
        (*inputs)[images[i].string()] = hash_hex(svp::hash_file(images[i]));
        (*inputs)[manuals[i].string()] = hash_hex(svp::hash_file(manuals[i]));
        if (has_fov)
            (*inputs)[fovs[i].string()] = hash_hex(svp::hash_file(fovs[i]));

        const svp::RgbImage img = svp::read_image(images[i]);
        const svp::SegmentationResult seg = svp::segment_vessels(img, config.seg);
        const svp::BinaryMask truth = mask_from_image(svp::read_image(manuals[i]));
        const svp::BinaryMask fov =
            has_fov ? mask_from_image(svp::read_image(fovs[i])) : seg.fov_mask;
        const svp::SegScores s = svp::seg_scores(svp::confusion(seg.vessel_mask, truth, fov));

        csv << images[i].filename().string() << ',' << fmt(s.accuracy * 100.0, 2) << ','
            << fmt(s.sensitivity * 100.0, 2) << ',' << fmt(s.specificity * 100.0, 2) << '\n';
        sum_acc += s.accuracy;
        sum_sen += s.sensitivity;
        sum_spe += s.specificity;
    }
    const double n = double(images.size());
    csv << "average," << fmt(sum_acc / n * 100.0, 2) << ',' << fmt(sum_sen / n * 100.0, 2) << ','
        << fmt(sum_spe / n * 100.0, 2) << '\n';
    write_text(out_dir / "drive_scores.csv", csv.str());
    return 0;
}

int eval_review(const std::string& review, const fs::path& out_dir,
                const svp::PipelineConfig& config, json* inputs) {
    const auto ann = svp::load_annotations(review);
    (*inputs)[review] = hash_hex(svp::hash_file(review));
    const fs::path base = fs::path(review).parent_path();

    struct ImageEval {
        svp::RgbImage img;
        svp::GrayImage green;
        svp::SegmentationResult seg;
        std::vector<svp::CenterlinePath> paths;
        std::map<int, svp::DiameterProfile> widths_by_path;

        ImageEval(svp::RgbImage image, const svp::PipelineConfig& cfg)
            : img(std::move(image)),
              green(svp::green_channel(img)),
              seg(svp::segment_vessels(img, cfg.seg)),
              paths(svp::extract_centerlines(seg.vessel_mask, cfg.skeleton)) {}
    };
    std::map<std::string, std::unique_ptr<ImageEval>> cache;

    std::ostringstream csv;
    csv << "image,segment,points,matched,unmatched,mu_mean,sigma_mean,mu_error,sigma_error\n";
    std::int64_t total_points = 0, total_matched = 0, total_unmatched = 0;
    double sum_mu_mean = 0.0, sum_sigma_mean = 0.0, sum_mu_err = 0.0, sum_sigma_err = 0.0;
    int scored_groups = 0;

    for (const auto& [image_name, segment] : ann.groups()) {
        auto& entry = cache[image_name];
        if (!entry) {
            const fs::path img_path =
                fs::path(image_name).is_absolute() ? fs::path(image_name) : base / image_name;
            (*inputs)[img_path.string()] = hash_hex(svp::hash_file(img_path));
            entry = std::make_unique<ImageEval>(svp::read_image(img_path), config);
        }

        std::vector<svp::AnnotationRecord> records;
        for (std::size_t k : ann.group(image_name, segment))
            records.push_back(ann.records[k]);

        // The annotation's segment numbering is the dataset's, not ours:
        // map the group onto whichever path most of its points sit on.
        std::map<int, int> votes;
        for (const auto& rec : records) {
            const svp::Selection sel = svp::select_nearest(
                entry->paths,
                {int(std::lround(rec.cx)), int(std::lround(rec.cy))});
            ++votes[sel.index];
        }
        int best = votes.begin()->first;
        for (const auto& [idx, n] : votes)
            if (n > votes[best])
                best = idx;

        auto it = entry->widths_by_path.find(best);
        if (it == entry->widths_by_path.end()) {
            const auto& path = entry->paths[std::size_t(best)];
            const svp::VesselEstimate est = svp::estimate_vessel(
                entry->green, entry->paths, path.points[path.points.size() / 2],
                entry->seg.max_diameter, config.caliper);
            it = entry->widths_by_path.emplace(best, est.widths).first;
        }

        const svp::MatchedWidths m =
            svp::match_widths(entry->paths[std::size_t(best)], it->second, records);
        const int matched = int(m.cmp.estimated.size());
        total_points += std::int64_t(records.size());
        total_matched += matched;
        total_unmatched += m.unmatched;

        csv << image_name << ',' << segment << ',' << records.size() << ',' << matched << ','
            << m.unmatched << ',';
        if (matched >= 2) {
            const svp::WidthStats st = svp::width_error(m.cmp);
            csv << fmt(st.mu_mean, 4) << ',' << fmt(st.sigma_mean, 4) << ','
                << fmt(st.mu_error, 4) << ',' << fmt(st.sigma_error, 4) << '\n';
            sum_mu_mean += st.mu_mean;
            sum_sigma_mean += st.sigma_mean;
            sum_mu_err += st.mu_error;
            sum_sigma_err += st.sigma_error;
            ++scored_groups;
        } else {
            csv << "nan,nan,nan,nan\n";
        }
    }

    csv << "average,," << total_points << ',' << total_matched << ',' << total_unmatched << ',';
    if (scored_groups > 0) {
        const double n = double(scored_groups);
        csv << fmt(sum_mu_mean / n, 4) << ',' << fmt(sum_sigma_mean / n, 4) << ','
            << fmt(sum_mu_err / n, 4) << ',' << fmt(sum_sigma_err / n, 4) << '\n';
    } else {
        csv << "nan,nan,nan,nan\n";
    }
    write_text(out_dir / "review_scores.csv", csv.str());
    return 0;
}

int run_eval(const std::string& drive, const std::string& review, const std::string& out,
             const std::string& config_path) {
    if (drive.empty() == review.empty())
        throw UsageError{"exactly one of --drive or --review is required"};
    const svp::PipelineConfig config = load_config(config_path);
    const fs::path out_dir(out);
    fs::create_directories(out_dir);

    json inputs;
    const int code = drive.empty() ? eval_review(review, out_dir, config, &inputs)
                                   : eval_drive(drive, out_dir, config, &inputs);

    json manifest;
    manifest["command"] = "eval";
    manifest["args"] = {{"mode", drive.empty() ? "review" : "drive"}};
    manifest["config"] = svp::pipeline_config_to_text(config);
    manifest["inputs"] = inputs;
    write_manifest(out_dir, manifest);
    return code;
}

int run_synth(const std::string& scene_path, const std::string& out, std::uint64_t seed) {
    const svp::SceneSpec scene = svp::load_scene(scene_path);

    const fs::path out_dir(out);
    fs::create_directories(out_dir);
    json inputs;
    inputs[scene_path] = hash_hex(svp::hash_file(scene_path));

    std::vector<svp::RgbImage> frames;
    svp::SynthTruth truth;
    std::vector<svp::DiameterSeries> series;
    if (std::lround(scene.duration_s * scene.fps) >= 2) {
        svp::SequenceResult seq = svp::render_sequence(scene, seed);
        frames = std::move(seq.frames);
        truth = std::move(seq.frame0_truth);
        series = std::move(seq.truth_series);
    } else {
        svp::RenderResult r = svp::render(scene, seed);
        frames.push_back(std::move(r.image));
        truth = std::move(r.truth);
    }

    for (std::size_t t = 0; t < frames.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04lu.png", static_cast<unsigned long>(t));
        svp::write_png(out_dir / name, frames[t]);
    }

    std::ostringstream truth_csv;
    truth_csv << "image,segment,point,cx,cy,width\n";
    for (std::size_t v = 0; v < truth.centerlines.size(); ++v)
        for (std::size_t i = 0; i < truth.centerlines[v].size(); ++i)
            truth_csv << "frame_0000.png," << v + 1 << ',' << i + 1 << ','
                      << fmt(truth.centerlines[v][i].x, 3) << ','
                      << fmt(truth.centerlines[v][i].y, 3) << ','
                      << fmt(truth.widths[v][i], 4) << '\n';
    write_text(out_dir / "truth.csv", truth_csv.str());

    if (!series.empty()) {
        std::ostringstream scsv;
        scsv << "frame";
        for (std::size_t v = 0; v < series.size(); ++v) scsv << ",vessel_" << v + 1;
        scsv << '\n';
        for (std::size_t t = 0; t < frames.size(); ++t) {
            scsv << t;
            for (const auto& s : series) scsv << ',' << fmt(s.values[t], 6);
            scsv << '\n';
        }
        write_text(out_dir / "truth_series.csv", scsv.str());
    }

    write_text(out_dir / "scene_echo.cfg", svp::scene_to_text(scene));

    json manifest;
    manifest["command"] = "synth";
    manifest["args"] = {{"seed", seed}};
    manifest["scene"] = svp::scene_to_text(scene);
    manifest["inputs"] = inputs;
    write_manifest(out_dir, manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vessel segmentation, width measurement and pulsation analysis "
                 "for fundus image sequences"};
    app.set_version_flag("--version", svp::kToolVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir, input, at, drive, review, scene_path;
    std::vector<std::string> frame_args, ats;
    int segment_id = 0;
    bool debug = false;
    double fps = 30.0;
    std::uint64_t seed = 0;

    auto* seg_cmd =
        app.add_subcommand("segment", "segment vessels; write masks and a centerline overlay");
    seg_cmd->add_option("input", input, "fundus image (PNG, PPM or BMP)")->required();
    seg_cmd->add_option("-o,--out", out_dir, "output directory")->required();
    seg_cmd->add_option("-c,--config", config_path, "pipeline config file");
    seg_cmd->add_flag("--debug", debug, "also write the intermediate stage images");

    auto* measure_cmd =
        app.add_subcommand("measure", "measure per-point widths along one vessel segment");
    measure_cmd->add_option("input", input, "fundus image (PNG, PPM or BMP)")->required();
    measure_cmd->add_option("-o,--out", out_dir, "output directory")->required();
    measure_cmd->add_option("-c,--config", config_path, "pipeline config file");
    measure_cmd->add_option("--at", at, "select the segment nearest X,Y");
    measure_cmd->add_option("--segment", segment_id, "select a segment by id (see segments.csv)")
        ->check(CLI::PositiveNumber);
    measure_cmd->add_flag("--debug", debug, "also write the pre-repair clustered mask");

    auto* track_cmd = app.add_subcommand(
        "track", "track vessel diameter across frames and estimate the pulse rate");
    track_cmd->add_option("frames", frame_args, "frame files, or a single directory of frames")
        ->required();
    track_cmd->add_option("-o,--out", out_dir, "output directory")->required();
    track_cmd->add_option("-c,--config", config_path, "pipeline config file");
    track_cmd->add_option("--at", ats, "vessel click X,Y on frame 0 (repeatable)")->required();
    track_cmd->add_option("--fps", fps, "frames per second")->check(CLI::PositiveNumber);

    auto* eval_cmd = app.add_subcommand(
        "eval", "score segmentation or width estimates against ground truth");
    eval_cmd->add_option("-o,--out", out_dir, "output directory")->required();
    eval_cmd->add_option("-c,--config", config_path, "pipeline config file");
    eval_cmd->add_option("--drive", drive,
                         "dataset directory with images/ and manual/ (optional fov/)");
    eval_cmd->add_option("--review", review, "width annotation CSV");

    auto* synth_cmd =
        app.add_subcommand("synth", "render a synthetic vessel scene with ground truth");
    synth_cmd->add_option("scene", scene_path, "scene description file")->required();
    synth_cmd->add_option("-o,--out", out_dir, "output directory")->required();
    synth_cmd->add_option("--seed", seed, "noise seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (app.got_subcommand(seg_cmd))
            return run_segment(input, out_dir, config_path, debug);
        if (app.got_subcommand(measure_cmd))
            return run_measure(input, out_dir, config_path, at, segment_id, debug);
        if (app.got_subcommand(track_cmd))
            return run_track(frame_args, ats, fps, track_cmd->count("--fps") > 0, out_dir,
                             config_path);
        if (app.got_subcommand(eval_cmd))
            return run_eval(drive, review, out_dir, config_path);
        if (app.got_subcommand(synth_cmd))
            return run_synth(scene_path, out_dir, seed);
        return 64;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.message << "\n";
        return 64;
    } catch (const svp::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const svp::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const svp::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 65;
    } catch (const svp::InvalidParameter& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const svp::OutOfRange& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const svp::ShapeMismatch& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const svp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
