#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "srnet/classifier.hpp"
#include "srnet/metrics.hpp"
#include "srnet/srcnn.hpp"

namespace srnet {

namespace fs = std::filesystem;

struct ClassifierSettings {
    std::vector<int> hidden_dims{24};
    Activation hidden_activation = Activation::Sigmoid;
    std::size_t max_iter = 500;
    double grad_tol = 1e-6;
    std::uint64_t seed = 1;
};

enum class SrcnnInit {
    Gaussian,  ///< every weight drawn from N(0, 1/fan_in)
    Identity,  ///< Gaussian, but one feature path starts as an exact pass-through
};

const char* to_string(SrcnnInit init);
SrcnnInit srcnn_init_from_string(const std::string& name);

struct SrcnnSettings {
    SrcnnGeometry geometry{};
    SrcnnInit init = SrcnnInit::Gaussian;
    SgdConfig sgd{0.03, 1, 100, 0};
    int patch_size = 33;
    int stride = 14;
    int factor = 3;
    bool shared = false;  ///< one model for all bands instead of one per band
    std::uint64_t seed = 2;
};

/// A small shared model (5x5 first layer, 16 and 8 maps, 80 epochs) that
/// trains on a 128x128 six-band scene in about a minute on one core.
SrcnnSettings desk_srcnn_settings();

/// Model initialization according to the settings' init policy.
SrcnnModel init_srcnn(const SrcnnSettings& settings, std::uint64_t seed);

/// Trains one SRCNN on the pairs synthesized from every given band.
SrcnnTraining train_srcnn_on_bands(std::span<const BandRaster> bands, const SrcnnSettings& settings,
                                   std::uint64_t seed);

/// Per-band models (or one shared model repeated) for a scene.
struct SrcnnBank {
    std::vector<SrcnnModel> models;  ///< one entry, or one per band
    std::vector<std::vector<double>> loss_traces;

    const SrcnnModel& for_band(std::size_t band) const { return models.size() == 1 ? models[0] : models.at(band); }
};

SrcnnBank train_srcnn_bank(const MultispectralScene& scene, const SrcnnSettings& settings);
void save_srcnn_bank(const SrcnnBank& bank, const MultispectralScene& scene, const fs::path& dir);
SrcnnBank load_srcnn_bank(const MultispectralScene& scene, const fs::path& dir);

enum class UpscaleMethod { Bilinear, Bicubic, Srcnn };

const char* to_string(UpscaleMethod method);
UpscaleMethod upscale_method_from_string(const std::string& name);

/// Upscales every band of a scene once by `factor`.
MultispectralScene upscale_scene(const MultispectralScene& scene, UpscaleMethod method, int factor,
                                 const SrcnnBank* bank = nullptr);

struct ExperimentConfig {
    fs::path scene_manifest;
    fs::path region_file;
    std::optional<fs::path> truth_map;  ///< per-pixel truth for accuracy reporting
    fs::path output_dir = "experiment_out";
    ClassifierSettings classifier{};
    SrcnnSettings srcnn{};
    std::vector<UpscaleMethod> methods{UpscaleMethod::Bicubic, UpscaleMethod::Srcnn};
    int steps = 3;
};

/// Reads a JSON config. Relative paths resolve against the config's directory;
/// missing keys keep their defaults.
ExperimentConfig load_config(const fs::path& path);
std::string config_to_json(const ExperimentConfig& config);
/// Checks steps, methods, and that referenced input files exist.
void validate_config(const ExperimentConfig& config);
/// Replaces every seed in the config.
void override_seeds(ExperimentConfig& config, std::uint64_t seed);

struct ClassificationRow {
    std::string method;
    int step = 0;
    int width = 0;
    int height = 0;
    double accuracy = 0.0;
    std::vector<double> recall;  ///< per class; NaN when the class is absent
};

struct ExperimentResult {
    std::vector<std::pair<std::string, fs::path>> class_maps;  ///< "<method>/step<n>" -> file
    PsnrReport psnr;
    std::vector<ClassificationRow> classification;  ///< filled when a truth map is configured
    fs::path psnr_csv;
    fs::path psnr_plot;
    fs::path classification_csv;
    fs::path classifier_trace;
    std::vector<fs::path> srcnn_traces;
    fs::path classifier_model;
    std::vector<fs::path> srcnn_models;
    fs::path metadata;
};

/// Load, train the classifier once, train SRCNN (when requested), then for
/// each method classify steps 0..steps of repeated 3x upscaling and score
/// chained PSNR. A stage failure leaves <output>/FAILED and rethrows.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct PlotSummary {
    int curves = 0;
    int annotations = 0;
};

/// SVG line chart of PSNR against step, one curve per (method, band).
/// Infinite rows are listed as annotations rather than plotted.
PlotSummary render_psnr_plot(const PsnrReport& report, const fs::path& path);

/// Entry point of the command-line tool.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srnet
