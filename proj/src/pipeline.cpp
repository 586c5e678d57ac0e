#include "uscan/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uscan/frame_metrics.hpp"
#include "uscan/mask_eval.hpp"
#include "uscan/stack_io.hpp"
#include "uscan/util.hpp"

namespace uscan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kStageNames[] = {"synth",   "ingest",      "segment", "eval",
                                       "metrics", "reconstruct", "augment"};

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& section) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return it.key() == k;
            }) == allowed.end())
            throw ConfigInvalid("unknown key '" + it.key() + "' in " + section);
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key) || obj[key].is_null()) return fallback;
    try {
        return obj[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigInvalid(std::string("config field '") + key + "' has the wrong type");
    }
}

std::array<double, 3> triple(const json& obj, const char* key,
                             const std::array<double, 3>& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto v = obj[key];
    if (!v.is_array() || v.size() != 3)
        throw ConfigInvalid(std::string("config field '") + key + "' must hold 3 numbers");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct StageClock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

VoxelGrid union_grids(const VoxelGrid& a, const VoxelGrid& b) {
    VoxelGrid out = a;
    for (std::size_t i = 0; i < out.occupancy.size(); ++i)
        out.occupancy[i] = a.occupancy[i] || b.occupancy[i];
    return out;
}

}  // namespace

std::string stage_name(Stage s) { return kStageNames[static_cast<int>(s)]; }

std::optional<Stage> stage_from_name(const std::string& name) {
    for (int i = 0; i < 7; ++i)
        if (name == kStageNames[i]) return static_cast<Stage>(i);
    return std::nullopt;
}

std::vector<Stage> parse_stages(const std::string& csv) {
    std::vector<Stage> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        const auto s = stage_from_name(tok);
        if (!s) throw ConfigInvalid("unknown stage '" + tok + "'");
        out.push_back(*s);
    }
    if (out.empty()) throw ConfigInvalid("no stages selected");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ScanManifest PipelineConfig::synth_manifest() const {
    return ScanManifest::make(stack_slices, stack_width, stack_height, pixel_size_mm,
                              scan_length_mm, source_id, dynamic_range_db);
}

PipelineConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, true);  // allow comments
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigInvalid("config root must be an object");
    reject_unknown_keys(j,
                        {"seed", "pixel_size_mm", "threads", "output_root", "stack", "capture",
                         "phantom", "segment", "metrics", "reconstruct", "augment"},
                        "config root");

    PipelineConfig cfg;
    if (!j.contains("pixel_size_mm") || j["pixel_size_mm"].is_null())
        throw ConfigInvalid("config field 'pixel_size_mm' is required (in-plane mm per pixel)");
    cfg.pixel_size_mm = j["pixel_size_mm"].get<double>();
    if (!(cfg.pixel_size_mm > 0.0)) throw ConfigInvalid("'pixel_size_mm' must be positive");

    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    cfg.threads = get_or<int>(j, "threads", 1);
    if (cfg.threads < 1) throw ConfigInvalid("'threads' must be >= 1");
    cfg.output_root = get_or<std::string>(j, "output_root", "out");

    if (j.contains("stack")) {
        const auto& s = j["stack"];
        reject_unknown_keys(s,
                            {"width", "height", "slices", "scan_length_mm", "source_id",
                             "dynamic_range_db"},
                            "stack");
        cfg.stack_width = get_or<int>(s, "width", cfg.stack_width);
        cfg.stack_height = get_or<int>(s, "height", cfg.stack_height);
        cfg.stack_slices = get_or<int>(s, "slices", cfg.stack_slices);
        cfg.scan_length_mm = get_or<double>(s, "scan_length_mm", cfg.scan_length_mm);
        cfg.source_id = get_or<std::string>(s, "source_id", cfg.source_id);
        if (s.contains("dynamic_range_db") && !s["dynamic_range_db"].is_null())
            cfg.dynamic_range_db = s["dynamic_range_db"].get<double>();
        if (cfg.stack_width <= 0 || cfg.stack_height <= 0 || cfg.stack_slices <= 0)
            throw ConfigInvalid("stack dimensions must be positive");
    }

    if (j.contains("capture")) {
        const auto& c = j["capture"];
        reject_unknown_keys(c,
                            {"profile", "frames_dir", "gray_threshold", "roi", "fps",
                             "scan_length_mm", "retain_count", "frame_stride"},
                            "capture");
        if (c.contains("profile")) {
            const auto name = c["profile"].get<std::string>();
            const auto prof = machine_profile(name);
            if (!prof) throw ConfigInvalid("unknown capture.profile '" + name + "'");
            cfg.capture = *prof;
        }
        if (c.contains("frames_dir")) cfg.frames_dir = c["frames_dir"].get<std::string>();
        cfg.capture.gray_threshold = get_or<double>(c, "gray_threshold", cfg.capture.gray_threshold);
        cfg.capture.fps = get_or<double>(c, "fps", cfg.capture.fps);
        cfg.capture.scan_length_mm = get_or<double>(c, "scan_length_mm", cfg.capture.scan_length_mm);
        cfg.capture.retain_count = get_or<int>(c, "retain_count", cfg.capture.retain_count);
        cfg.capture.frame_stride = get_or<int>(c, "frame_stride", cfg.capture.frame_stride);
        if (c.contains("roi")) {
            const auto& r = c["roi"];
            if (!r.is_array() || r.size() != 4)
                throw ConfigInvalid("capture.roi must be [x, y, w, h]");
            cfg.capture.roi_x = r[0].get<int>();
            cfg.capture.roi_y = r[1].get<int>();
            cfg.capture.roi_w = r[2].get<int>();
            cfg.capture.roi_h = r[3].get<int>();
        }
    }
    cfg.capture.pixel_size_mm = cfg.pixel_size_mm;

    if (j.contains("phantom")) {
        const auto& p = j["phantom"];
        reject_unknown_keys(p,
                            {"outer_radii_mm", "central_radii_mm", "channel_radius_mm",
                             "intensities", "speckle_sigma", "resection"},
                            "phantom");
        cfg.phantom.outer_radii_mm = triple(p, "outer_radii_mm", cfg.phantom.outer_radii_mm);
        cfg.phantom.central_radii_mm = triple(p, "central_radii_mm", cfg.phantom.central_radii_mm);
        cfg.phantom.channel_radius_mm =
            get_or<double>(p, "channel_radius_mm", cfg.phantom.channel_radius_mm);
        cfg.phantom.speckle_sigma = get_or<double>(p, "speckle_sigma", cfg.phantom.speckle_sigma);
        if (p.contains("intensities")) {
            const auto& v = p["intensities"];
            if (!v.is_array() || v.size() != kNumClasses)
                throw ConfigInvalid("phantom.intensities must hold 4 gray values");
            for (int i = 0; i < kNumClasses; ++i) cfg.phantom.intensities[i] = v[i].get<int>();
        }
        if (p.contains("resection") && !p["resection"].is_null()) {
            const auto& r = p["resection"];
            reject_unknown_keys(r, {"radius_profile_mm", "jaggedness", "patches"},
                                "phantom.resection");
            ResectionSpec spec;
            if (r.contains("radius_profile_mm"))
                spec.radius_profile_mm = r["radius_profile_mm"].get<std::vector<double>>();
            spec.jaggedness = get_or<double>(r, "jaggedness", 0.0);
            if (r.contains("patches")) {
                for (const auto& q : r["patches"]) {
                    reject_unknown_keys(q, {"slices", "angles", "depth_mm"},
                                        "phantom.resection.patches[]");
                    PerforationPatch patch;
                    const auto& sl = q.at("slices");
                    const auto& an = q.at("angles");
                    if (!sl.is_array() || sl.size() != 2 || !an.is_array() || an.size() != 2)
                        throw ConfigInvalid("patch 'slices' and 'angles' must be 2-element ranges");
                    patch.slice_begin = sl[0].get<int>();
                    patch.slice_end = sl[1].get<int>();
                    patch.angle_begin = an[0].get<double>();
                    patch.angle_end = an[1].get<double>();
                    patch.depth_mm = q.at("depth_mm").get<double>();
                    spec.patches.push_back(patch);
                }
            }
            cfg.phantom.resection = std::move(spec);
        }
    }
    cfg.phantom.seed = cfg.seed;

    if (j.contains("segment")) {
        const auto& s = j["segment"];
        reject_unknown_keys(s,
                            {"gauss_sigma", "snake", "init_rect", "inner_init_scale", "chanvese",
                             "tophat_radius_px", "flood_tolerance", "min_region_area_px",
                             "max_failed_fraction"},
                            "segment");
        cfg.segment.gauss_sigma = get_or<double>(s, "gauss_sigma", cfg.segment.gauss_sigma);
        cfg.segment.inner_init_scale =
            get_or<double>(s, "inner_init_scale", cfg.segment.inner_init_scale);
        cfg.segment.tophat_radius_px =
            get_or<int>(s, "tophat_radius_px", cfg.segment.tophat_radius_px);
        cfg.segment.flood_tolerance =
            get_or<int>(s, "flood_tolerance", cfg.segment.flood_tolerance);
        cfg.segment.min_region_area_px =
            get_or<double>(s, "min_region_area_px", cfg.segment.min_region_area_px);
        cfg.segment.max_failed_fraction =
            get_or<double>(s, "max_failed_fraction", cfg.segment.max_failed_fraction);
        if (s.contains("snake")) {
            const auto& n = s["snake"];
            reject_unknown_keys(
                n, {"alpha", "beta", "gamma", "max_iters", "convergence_tol", "n_points"},
                "segment.snake");
            cfg.segment.snake.alpha = get_or<double>(n, "alpha", cfg.segment.snake.alpha);
            cfg.segment.snake.beta = get_or<double>(n, "beta", cfg.segment.snake.beta);
            cfg.segment.snake.gamma = get_or<double>(n, "gamma", cfg.segment.snake.gamma);
            cfg.segment.snake.max_iters = get_or<int>(n, "max_iters", cfg.segment.snake.max_iters);
            cfg.segment.snake.convergence_tol =
                get_or<double>(n, "convergence_tol", cfg.segment.snake.convergence_tol);
            cfg.segment.snake.n_points = get_or<int>(n, "n_points", cfg.segment.snake.n_points);
        }
        if (s.contains("chanvese")) {
            const auto& n = s["chanvese"];
            reject_unknown_keys(n, {"lambda1", "lambda2", "smoothing_passes", "max_iters"},
                                "segment.chanvese");
            cfg.segment.chanvese.lambda1 = get_or<double>(n, "lambda1", 1.0);
            cfg.segment.chanvese.lambda2 = get_or<double>(n, "lambda2", 1.0);
            cfg.segment.chanvese.smoothing_passes = get_or<int>(n, "smoothing_passes", 1);
            cfg.segment.chanvese.max_iters = get_or<int>(n, "max_iters", 150);
        }
        if (s.contains("init_rect")) {
            const auto& r = s["init_rect"];
            if (!r.is_array() || r.size() != 4)
                throw ConfigInvalid("segment.init_rect must be [x, y, w, h]");
            cfg.segment.init_rect = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                                     r[3].get<double>()};
        }
    }

    if (j.contains("metrics")) {
        reject_unknown_keys(j["metrics"], {"harmonics"}, "metrics");
        cfg.metrics_harmonics = get_or<int>(j["metrics"], "harmonics", cfg.metrics_harmonics);
        if (cfg.metrics_harmonics < 1) throw ConfigInvalid("metrics.harmonics must be >= 1");
    }

    if (j.contains("reconstruct")) {
        reject_unknown_keys(j["reconstruct"], {"format"}, "reconstruct");
        cfg.mesh_format = get_or<std::string>(j["reconstruct"], "format", cfg.mesh_format);
        mesh_format_from_name(cfg.mesh_format);  // validate now
    }

    if (j.contains("augment")) {
        const auto& a = j["augment"];
        reject_unknown_keys(a,
                            {"scales", "base_resolution", "noise_amplitude",
                             "morph_jitter_radius", "allowed_region_margin_mm", "variant_count",
                             "iou_bounds", "external_resection_grid"},
                            "augment");
        cfg.augment.scales = get_or<int>(a, "scales", cfg.augment.scales);
        cfg.augment.base_resolution =
            get_or<int>(a, "base_resolution", cfg.augment.base_resolution);
        if (a.contains("noise_amplitude"))
            cfg.augment.noise_amplitude = a["noise_amplitude"].get<std::vector<double>>();
        if (a.contains("morph_jitter_radius"))
            cfg.augment.morph_jitter_radius = a["morph_jitter_radius"].get<std::vector<int>>();
        cfg.augment.allowed_region_margin_mm =
            get_or<double>(a, "allowed_region_margin_mm", cfg.augment.allowed_region_margin_mm);
        cfg.augment.variant_count = get_or<int>(a, "variant_count", cfg.augment.variant_count);
        if (a.contains("iou_bounds")) {
            const auto& b = a["iou_bounds"];
            if (!b.is_array() || b.size() != 2)
                throw ConfigInvalid("augment.iou_bounds must be [lo, hi]");
            cfg.augment.iou_lo = b[0].get<double>();
            cfg.augment.iou_hi = b[1].get<double>();
        }
        if (a.contains("external_resection_grid"))
            cfg.external_resection_grid = a["external_resection_grid"].get<std::string>();
    }
    cfg.augment.seed = cfg.seed;
    cfg.augment.validate();
    cfg.segment.validate();
    cfg.phantom.validate();

    // environment overrides sit between config and command-line flags
    if (const char* env = std::getenv("USCAN_OUTPUT_ROOT")) cfg.output_root = env;
    if (const char* env = std::getenv("USCAN_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) cfg.threads = t;
    }
    cfg.raw_json = text;
    return cfg;
}

PipelineConfig load_config(const fs::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw ConfigInvalid("cannot open config file " + file.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::vector<Image8> read_frames_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoFailure("frames directory missing: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<Image8> frames;
    frames.reserve(files.size());
    for (const auto& f : files) frames.push_back(read_png_gray(f));
    return frames;
}

Rect default_init_rect(int w, int h) {
    return {0.04 * w, 0.04 * h, 0.92 * w, 0.92 * h};
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, const std::vector<Stage>& stages) {
    PipelineResult result;
    const fs::path root = cfg.output_root;
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) {
        result.exit_code = 10;
        result.error = "cannot create output root " + root.string();
        return result;
    }

    auto selected = [&](Stage s) {
        return std::find(stages.begin(), stages.end(), s) != stages.end();
    };

    const fs::path stack_dir = root / "stack";
    const fs::path truth_dir = root / "truth_labels";
    const fs::path labels_dir = root / "labels";
    const fs::path labels_src = cfg.labels_dir_override.value_or(labels_dir);
    const fs::path mesh_dir = root / "meshes";
    const fs::path augment_dir = root / "augment";

    json manifest;
    manifest["seed"] = cfg.seed;
    manifest["started_utc"] = timestamp_utc();
    manifest["config_hash"] = hex64(fnv1a64(cfg.raw_json));
    if (!cfg.raw_json.empty())
        manifest["config"] = json::parse(cfg.raw_json, nullptr, true, true);
    manifest["stages"] = json::array();

    Stage current = Stage::synth;
    try {
        if (selected(Stage::synth)) {
            current = Stage::synth;
            StageClock clock;
            const ScanManifest sm = cfg.synth_manifest();
            auto [stack, truth] = synth_phantom(cfg.phantom, sm);
            write_stack(stack, stack_dir);
            write_labels(truth, truth_dir);
            result.timings.push_back({stage_name(current), clock.seconds()});
        }

        if (selected(Stage::ingest)) {
            current = Stage::ingest;
            StageClock clock;
            if (!cfg.frames_dir)
                throw ConfigInvalid("ingest stage needs capture.frames_dir");
            const auto frames = read_frames_dir(*cfg.frames_dir);
            CaptureConfig cap = cfg.capture;
            if (cap.roi_w == 0 && !frames.empty()) {
                cap.roi_w = frames.front().width();
                cap.roi_h = frames.front().height();
            }
            const int start = detect_scan_start(frames, cap);
            const ImageStack stack = assemble_stack(frames, start, cap);
            write_stack(stack, stack_dir);
            manifest["scan_start_frame"] = start;
            result.timings.push_back({stage_name(current), clock.seconds()});
        }

        std::optional<LabelVolume> labels;
        if (selected(Stage::segment)) {
            current = Stage::segment;
            StageClock clock;
            const ImageStack stack = read_stack(stack_dir);
            SegmentConfig seg = cfg.segment;
            if (seg.init_rect.w <= 0.0 || seg.init_rect.h <= 0.0)
                seg.init_rect = default_init_rect(stack.manifest.pixel_width,
                                                  stack.manifest.pixel_height);
            const StackSegmentation out = segment_stack(stack, seg);
            write_labels(out.volume, labels_dir);
            std::ofstream log(root / "segment_log.txt");
            for (const auto& r : out.records) {
                log << "slice " << r.slice << " ok=" << r.ok << " converged=" << r.converged
                    << " resection=" << r.has_resection;
                if (r.filled_from >= 0) log << " filled_from=" << r.filled_from;
                if (!r.error.empty()) log << " error=" << r.error;
                log << "\n";
            }
            labels = out.volume;
            result.timings.push_back({stage_name(current), clock.seconds()});
        }

        if (selected(Stage::eval)) {
            current = Stage::eval;
            StageClock clock;
            if (fs::exists(truth_dir / "manifest.json")) {
                if (!labels) labels = read_labels(labels_src);
                const LabelVolume truth = read_labels(truth_dir);
                const StackIouReport rep = stack_iou_stats(*labels, truth);
                std::ofstream kv(root / "eval_report.txt");
                kv << render_iou_report(rep);
                std::ofstream table(root / "eval_table.txt");
                IouTableRow row{"classical", rep.overall, rep.per_class[1], rep.per_class[0]};
                table << render_iou_table({row});
            }
            result.timings.push_back({stage_name(current), clock.seconds()});
        }

        if (selected(Stage::metrics)) {
            current = Stage::metrics;
            StageClock clock;
            if (!labels) labels = read_labels(labels_src);
            const MetricsReport rep = metrics_stack(*labels, cfg.metrics_harmonics);
            std::ofstream os(root / "metrics_report.txt");
            os << render_metrics_report(rep, true);
            result.timings.push_back({stage_name(current), clock.seconds()});
        }

        std::optional<ComponentGrids> grids;
        if (selected(Stage::reconstruct)) {
            current = Stage::reconstruct;
            StageClock clock;
            if (!labels) labels = read_labels(labels_src);
            grids = derive_component_grids(*labels);
            fs::create_directories(mesh_dir);
            const MeshFormat fmt = mesh_format_from_name(cfg.mesh_format);
            const std::string ext = "." + cfg.mesh_format;

            std::ofstream rep(root / "mesh_report.txt");
            auto surface = [&](const VoxelGrid& g, const std::string& name) {
                if (g.occupied_count() == 0) {
                    rep << name << " empty\n";
                    return;
                }
                const TriMesh mesh = marching_cubes(g);
                export_mesh(mesh, fmt, mesh_dir / (name + ext));
                const MeshStats st = mesh_stats(mesh);
                rep << name << " volume_mm3=" << st.volume_mm3 << " area_mm2=" << st.area_mm2
                    << " watertight=" << st.watertight << " euler=" << st.euler_characteristic
                    << " shells=" << st.shell_count << "\n";
            };
            surface(grids->per_class[1], "peripheral");
            surface(grids->per_class[2], "central");
            surface(grids->per_class[3], "resection");
            surface(grids->filled, "filled");
            write_voxel_grid(grids->filled, root / "filled.usvg");
            write_voxel_grid(grids->resection, root / "resection.usvg");
            write_voxel_grid(union_grids(grids->per_class[2], grids->per_class[3]),
                             root / "central_extent.usvg");
            result.timings.push_back({stage_name(current), clock.seconds()});
        }

        if (selected(Stage::augment)) {
            current = Stage::augment;
            StageClock clock;
            VoxelGrid filled, resection, central;
            if (fs::exists(root / "filled.usvg")) {
                filled = read_voxel_grid(root / "filled.usvg");
                resection = read_voxel_grid(root / "resection.usvg");
                central = read_voxel_grid(root / "central_extent.usvg");
            } else {
                if (!labels) labels = read_labels(labels_src);
                ComponentGrids g = derive_component_grids(*labels);
                filled = g.filled;
                resection = g.resection;
                central = union_grids(g.per_class[2], g.per_class[3]);
            }
            if (cfg.external_resection_grid)
                resection = read_voxel_grid(*cfg.external_resection_grid);

            const int n = cfg.augment.base_resolution;
            const std::array<int, 3> dims{n, n, n};
            filled = resample_grid(filled, dims);
            resection = resample_grid(resection, dims);
            central = resample_grid(central, dims);

            fs::create_directories(augment_dir);
            const MeshFormat fmt = mesh_format_from_name(cfg.mesh_format);
            std::vector<VoxelGrid> variants(cfg.augment.variant_count);
            parallel_for(cfg.augment.variant_count, cfg.threads, [&](int i) {
                variants[i] =
                    generate_resection_variant(resection, filled, central, cfg.augment, i);
            });
            for (int i = 0; i < cfg.augment.variant_count; ++i) {
                char name[32];
                std::snprintf(name, sizeof(name), "variant_%03d", i);
                const VariantModel model = apply_variant(filled, variants[i]);
                export_mesh(model.mesh, fmt, augment_dir / (std::string(name) + "." + cfg.mesh_format));
                write_voxel_grid(variants[i], augment_dir / (std::string(name) + ".usvg"));
            }
            const DiversityReport rep = diversity_report(variants, resection, cfg.augment);
            std::ofstream os(augment_dir / "diversity_report.txt");
            os << render_diversity_report(rep);
            result.timings.push_back({stage_name(current), clock.seconds()});
        }
    } catch (const std::exception& e) {
        result.exit_code = 10 + static_cast<int>(current);
        result.failed_stage = stage_name(current);
        result.error = e.what();
        std::ofstream marker(root / "FAILED");
        marker << stage_name(current) << ": " << e.what() << "\n";
    }

    for (const auto& t : result.timings) {
        json j;
        j["stage"] = t.stage;
        j["wall_s"] = t.wall_s;
        manifest["stages"].push_back(j);
    }
    manifest["threads"] = cfg.threads;
    manifest["pixel_size_mm"] = cfg.pixel_size_mm;
    manifest["output_root"] = root.string();
    if (cfg.frames_dir) manifest["frames_dir"] = cfg.frames_dir->string();
    manifest["ok"] = result.exit_code == 0;
    std::ofstream mf(root / "run_manifest.json");
    mf << manifest.dump(2) << "\n";
    return result;
}

}  // namespace uscan
