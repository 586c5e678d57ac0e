#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uscan/augment.hpp"
#include "uscan/ingest.hpp"
#include "uscan/phantom.hpp"
#include "uscan/segment.hpp"
#include "uscan/types.hpp"

namespace uscan {

/// Pipeline stages in execution order. Exit code on failure is
/// 10 + stage index.
enum class Stage { synth = 0, ingest, segment, eval, metrics, reconstruct, augment };

std::string stage_name(Stage s);
std::optional<Stage> stage_from_name(const std::string& name);

/// One config file drives every stage. JSON with a section per module;
/// unknown keys are rejected so typos surface early.
struct PipelineConfig {
    std::uint64_t seed = 0;
    double pixel_size_mm = 0.0;  // required
    int threads = 1;
    std::filesystem::path output_root = "out";

    // stack geometry when synthesizing
    int stack_width = 256;
    int stack_height = 256;
    int stack_slices = 85;
    double scan_length_mm = 60.0;
    std::string source_id = "synthetic";
    std::optional<double> dynamic_range_db;

    std::optional<std::filesystem::path> frames_dir;  // ingest input
    CaptureConfig capture;
    PhantomSpec phantom;
    SegmentConfig segment;
    int metrics_harmonics = 10;
    std::string mesh_format = "stl";
    AugmentConfig augment;

    std::optional<std::filesystem::path> external_resection_grid;  // imported variants source
    std::optional<std::filesystem::path> labels_dir_override;      // read labels from here

    std::string raw_json;  // verbatim config text, for the run manifest

    ScanManifest synth_manifest() const;
};

/// Parse + validate. Throws ConfigInvalid with a field-level message.
PipelineConfig load_config(const std::filesystem::path& file);
PipelineConfig parse_config(const std::string& text);

struct StageTiming {
    std::string stage;
    double wall_s = 0.0;
};

struct PipelineResult {
    int exit_code = 0;
    std::string failed_stage;
    std::string error;
    std::vector<StageTiming> timings;
};

/// Run the selected stages in order against one config. Artifacts land
/// under output_root; a run manifest records inputs, config hash, seed
/// and per-stage wall time. On stage failure the partial outputs stay and
/// a FAILED marker file names the stage.
PipelineResult run_pipeline(const PipelineConfig& cfg, const std::vector<Stage>& stages);

/// Parse a comma-separated stage list ("synth,segment,metrics").
std::vector<Stage> parse_stages(const std::string& csv);

}  // namespace uscan
