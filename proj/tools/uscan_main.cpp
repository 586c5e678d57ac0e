#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uscan/frame_metrics.hpp"
#include "uscan/mask_eval.hpp"
#include "uscan/pipeline.hpp"
#include "uscan/stack_io.hpp"
#include "uscan/util.hpp"

namespace fs = std::filesystem;
using namespace uscan;

namespace {

PipelineConfig load_or_die(const std::string& path) { return load_config(path); }

int run_stage_subset(const PipelineConfig& cfg, const std::vector<Stage>& stages) {
    const PipelineResult res = run_pipeline(cfg, stages);
    for (const auto& t : res.timings)
        std::fprintf(stderr, "[%s] %.2f s\n", t.stage.c_str(), t.wall_s);
    if (res.exit_code != 0)
        std::fprintf(stderr, "stage %s failed: %s\n", res.failed_stage.c_str(),
                     res.error.c_str());
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ultrasound phantom stacks: synthesis, segmentation, metrics, "
                 "3D reconstruction and shape augmentation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string stages_csv = "synth,segment,eval,metrics,reconstruct,augment";
    int threads_override = 0;
    long long seed_override = -1;

    auto add_common = [&](CLI::App* cmd, bool config_required = true) {
        auto* opt = cmd->add_option("--config,-c", config_path, "pipeline config file (JSON)");
        if (config_required) opt->required();
        cmd->add_option("--out,-o", out_override, "output root override");
        cmd->add_option("--threads,-t", threads_override, "global thread cap");
        cmd->add_option("--seed", seed_override, "seed override");
    };

    auto* synth = app.add_subcommand("synth", "generate a synthetic phantom stack + labels");
    add_common(synth);

    auto* ingest = app.add_subcommand("ingest", "detect scan start in a frame feed and build a stack");
    add_common(ingest);
    std::string frames_dir;
    ingest->add_option("--frames", frames_dir, "directory of frame PNGs");

    auto* segment = app.add_subcommand("segment", "run the classical segmentation cascade");
    add_common(segment);
    std::string stack_in;
    segment->add_option("--stack", stack_in, "input stack directory (default <out>/stack)");

    auto* eval = app.add_subcommand("eval", "score label volumes against references");
    std::vector<std::string> pred_dirs, ref_dirs;
    eval->add_option("--pred", pred_dirs, "predicted labels directory")->required();
    eval->add_option("--ref", ref_dirs, "reference labels directory")->required();
    std::string eval_out;
    eval->add_option("--report", eval_out, "write the key-value report here");

    auto* metrics = app.add_subcommand("metrics", "per-frame surgical performance scores");
    std::string labels_in, metrics_out;
    bool per_frame = false;
    metrics->add_option("--labels", labels_in, "labels directory")->required();
    metrics->add_option("--report", metrics_out, "write the report here");
    metrics->add_flag("--per-frame", per_frame, "append the per-frame table");
    int harmonics = 10;
    metrics->add_option("--harmonics", harmonics, "smoothness harmonics");

    auto* reconstruct = app.add_subcommand("reconstruct", "meshes per class from a label volume");
    add_common(reconstruct);
    reconstruct->add_option("--labels", labels_in, "labels directory (default <out>/labels)");

    auto* augment = app.add_subcommand("augment", "generate perturbed anatomy variants");
    add_common(augment);
    augment->add_option("--labels", labels_in, "labels directory (default <out>/labels)");
    std::string import_grid;
    augment->add_option("--import", import_grid,
                        "use an externally generated resection grid (.usvg) instead of the "
                        "procedural generator");

    auto* pipeline = app.add_subcommand("pipeline", "run several stages end to end");
    add_common(pipeline);
    pipeline->add_option("--stages", stages_csv, "comma-separated stage list");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval->parsed()) {
            if (pred_dirs.size() != ref_dirs.size())
                throw ConfigInvalid("--pred and --ref must be given the same number of times");
            std::vector<StackIouReport> reports;
            for (std::size_t i = 0; i < pred_dirs.size(); ++i) {
                const LabelVolume pred = read_labels(pred_dirs[i]);
                const LabelVolume ref = read_labels(ref_dirs[i]);
                reports.push_back(stack_iou_stats(pred, ref));
            }
            std::ostringstream os;
            for (std::size_t i = 0; i < reports.size(); ++i) {
                os << "# stack " << i << " (" << pred_dirs[i] << ")\n";
                os << render_iou_report(reports[i]);
            }
            IouTableRow row{"classical", {}, {}, {}};
            if (reports.size() > 1) {
                const DatasetIouReport ds = dataset_iou_stats(reports);
                os << "# dataset-level (mean over stacks)\n";
                os << "dataset.overall.mean " << ds.overall.mean << "\n";
                os << "dataset.overall.std " << ds.overall.std << "\n";
                for (std::size_t c = 0; c < ds.classes.size(); ++c) {
                    os << "dataset.class." << class_name(ds.classes[c]) << ".mean "
                       << ds.per_class[c].mean << "\n";
                    os << "dataset.class." << class_name(ds.classes[c]) << ".std "
                       << ds.per_class[c].std << "\n";
                }
                row = {"classical", ds.overall, ds.per_class[1], ds.per_class[0]};
            } else {
                row = {"classical", reports[0].overall, reports[0].per_class[1],
                       reports[0].per_class[0]};
            }
            std::cout << render_iou_table({row}) << "\n" << os.str();
            if (!eval_out.empty()) {
                std::ofstream f(eval_out);
                f << os.str();
            }
            return 0;
        }

        if (metrics->parsed()) {
            const LabelVolume vol = read_labels(labels_in);
            const MetricsReport rep = metrics_stack(vol, harmonics);
            const std::string text = render_metrics_report(rep, per_frame);
            std::cout << text;
            if (!metrics_out.empty()) {
                std::ofstream f(metrics_out);
                f << text;
            }
            return 0;
        }

        PipelineConfig cfg = load_or_die(config_path);
        if (!out_override.empty()) cfg.output_root = out_override;
        if (threads_override > 0) cfg.threads = threads_override;
        if (seed_override >= 0) {
            cfg.seed = std::uint64_t(seed_override);
            cfg.phantom.seed = cfg.seed;
            cfg.augment.seed = cfg.seed;
        }
        if (!frames_dir.empty()) cfg.frames_dir = frames_dir;
        if (!import_grid.empty()) cfg.external_resection_grid = import_grid;
        if (!labels_in.empty() && (reconstruct->parsed() || augment->parsed() ||
                                   pipeline->parsed()))
            cfg.labels_dir_override = labels_in;

        if (synth->parsed()) return run_stage_subset(cfg, {Stage::synth});
        if (ingest->parsed()) return run_stage_subset(cfg, {Stage::ingest});
        if (segment->parsed()) {
            if (!stack_in.empty()) {
                // segment an arbitrary stack directory into <out>/labels
                const ImageStack stack = read_stack(stack_in);
                SegmentConfig seg = cfg.segment;
                if (seg.init_rect.w <= 0.0 || seg.init_rect.h <= 0.0)
                    seg.init_rect = {0.04 * stack.manifest.pixel_width,
                                     0.04 * stack.manifest.pixel_height,
                                     0.92 * stack.manifest.pixel_width,
                                     0.92 * stack.manifest.pixel_height};
                const StackSegmentation out = segment_stack(stack, seg);
                fs::create_directories(cfg.output_root);
                write_labels(out.volume, cfg.output_root / "labels");
                std::ofstream log(cfg.output_root / "segment_log.txt");
                for (const auto& r : out.records) {
                    log << "slice " << r.slice << " ok=" << r.ok << " converged=" << r.converged
                        << " resection=" << r.has_resection;
                    if (r.filled_from >= 0) log << " filled_from=" << r.filled_from;
                    if (!r.error.empty()) log << " error=" << r.error;
                    log << "\n";
                }
                return 0;
            }
            return run_stage_subset(cfg, {Stage::segment});
        }
        if (reconstruct->parsed()) return run_stage_subset(cfg, {Stage::reconstruct});
        if (augment->parsed()) return run_stage_subset(cfg, {Stage::augment});
        if (pipeline->parsed()) return run_stage_subset(cfg, parse_stages(stages_csv));
    } catch (const ConfigInvalid& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
