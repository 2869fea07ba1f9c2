#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "srnet/error.hpp"
#include "srnet/interp.hpp"
#include "srnet/model_io.hpp"
#include "srnet/pipeline.hpp"
#include "srnet/synthetic.hpp"

namespace srnet {

namespace {

// Flags shared by every subcommand. Each subcommand starts from the config
// file (or the built-in defaults) and lets explicit flags win.
struct CommonFlags {
    std::string config;
    std::string scene;
    std::string regions;
    std::string output;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--scene", f.scene, "scene manifest, overrides the config");
    cmd->add_option("--regions", f.regions, "training region file, overrides the config");
}

ExperimentConfig resolve_config(const CommonFlags& f, std::optional<std::uint64_t> global_seed) {
    ExperimentConfig config = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (!f.scene.empty()) config.scene_manifest = f.scene;
    if (!f.regions.empty()) config.region_file = f.regions;
    if (!f.output.empty()) config.output_dir = f.output;
    if (global_seed) override_seeds(config, *global_seed);
    return config;
}

MultispectralScene require_scene(const ExperimentConfig& config) {
    if (config.scene_manifest.empty()) throw Error("no scene given (use --scene or a config)");
    return load_scene(config.scene_manifest);
}

ClassifierOptions classifier_options(const ClassifierSettings& s) {
    ClassifierOptions opts;
    opts.hidden_dims = s.hidden_dims;
    opts.hidden_activation = s.hidden_activation;
    opts.scg.max_iter = s.max_iter;
    opts.scg.grad_tol = s.grad_tol;
    opts.seed = s.seed;
    return opts;
}

std::string fmt_db(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"srnet: multispectral upscaling, super-resolution CNN and land-cover classification", "srnet"};
    app.require_subcommand(1);
    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "override every seed in the config");

    CommonFlags tc, tsr, up, cl, ex;
    std::string tc_out = "classifier.json", tc_trace;
    auto* train_classifier_cmd = app.add_subcommand("train-classifier", "train the land-cover classifier");
    add_common(train_classifier_cmd, tc);
    train_classifier_cmd->add_option("--out", tc_out, "model file to write");
    train_classifier_cmd->add_option("--trace", tc_trace, "loss trace CSV");

    std::string sr_out = "models";
    bool sr_shared = false;
    std::optional<std::size_t> sr_epochs;
    auto* train_sr_cmd = app.add_subcommand("train-sr", "train SRCNN models on the scene's own bands");
    add_common(train_sr_cmd, tsr);
    train_sr_cmd->add_option("--out", sr_out, "directory for the model files");
    train_sr_cmd->add_flag("--shared", sr_shared, "one model for every band");
    train_sr_cmd->add_option("--epochs", sr_epochs, "SGD epochs");

    std::string up_method = "bicubic", up_models, up_out = "upscaled";
    int up_factor = 3, up_steps = 1;
    auto* upscale_cmd = app.add_subcommand("upscale", "upscale a scene");
    add_common(upscale_cmd, up);
    upscale_cmd->add_option("--method", up_method, "bilinear | bicubic | srcnn")
        ->check(CLI::IsMember({"bilinear", "bicubic", "srcnn"}));
    upscale_cmd->add_option("--factor", up_factor, "integer upscale factor")->check(CLI::PositiveNumber);
    upscale_cmd->add_option("--steps", up_steps, "repeat the upscaling this many times")->check(CLI::PositiveNumber);
    upscale_cmd->add_option("--models", up_models, "SRCNN model directory (srcnn only)");
    upscale_cmd->add_option("--out", up_out, "output directory");

    std::string cl_model, cl_out = "classmap.pgm", cl_truth;
    auto* classify_cmd = app.add_subcommand("classify", "classify a scene into a class map");
    add_common(classify_cmd, cl);
    classify_cmd->add_option("--model", cl_model, "classifier model file")->required();
    classify_cmd->add_option("--out", cl_out, "class map PGM to write");
    classify_cmd->add_option("--truth", cl_truth, "per-pixel truth map; prints accuracy and recall");

    std::string ps_prev, ps_next;
    int ps_factor = 3;
    auto* psnr_cmd = app.add_subcommand("psnr", "PSNR between two PGM bands or two scene manifests");
    psnr_cmd->add_option("reference", ps_prev, "reference (step n-1) PGM or manifest")->required();
    psnr_cmd->add_option("derived", ps_next, "derived (step n) PGM or manifest")->required();
    psnr_cmd->add_option("--factor", ps_factor, "size ratio when the images differ")->check(CLI::PositiveNumber);

    auto* experiment_cmd = app.add_subcommand("experiment", "run the full upscale-then-classify study");
    add_common(experiment_cmd, ex);
    experiment_cmd->add_option("--output", ex.output, "output directory, overrides the config");

    int sy_width = 128, sy_height = 128;
    double sy_noise = 0.02;
    std::uint64_t sy_seed = 1;
    std::string sy_out = "synthetic";
    int sy_side = 8, sy_per_class = 6;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic 6-band scene with truth and a config");
    synth_cmd->add_option("--width", sy_width, "scene width in pixels")->capture_default_str()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--height", sy_height, "scene height in pixels")->capture_default_str()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--noise", sy_noise, "Gaussian noise sigma on [0,1] intensities")->capture_default_str();
    synth_cmd->add_option("--layout-seed", sy_seed, "layout and noise seed");
    synth_cmd->add_option("--region-size", sy_side, "side of the training squares")->capture_default_str();
    synth_cmd->add_option("--regions-per-class", sy_per_class, "training squares per class, at most")->capture_default_str();
    synth_cmd->add_option("--out", sy_out, "output directory")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }

    try {
        if (*train_classifier_cmd) {
            const ExperimentConfig config = resolve_config(tc, seed);
            const MultispectralScene scene = require_scene(config);
            if (config.region_file.empty()) throw Error("no region file given (use --regions or a config)");
            const RegionFile regions = load_regions(config.region_file);
            const FeatureSet data = label_regions(scene, regions.regions, FeatureMode::Pooled2x2, regions.class_names);
            const ClassifierTraining t = train_classifier(data, classifier_options(config.classifier));
            save_mlp(t.model, tc_out);
            if (!tc_trace.empty()) write_loss_trace(t.loss_trace, tc_trace);
            out << "trained on " << data.size() << " samples, " << t.iterations << " iterations, final loss "
                << (t.loss_trace.empty() ? 0.0 : t.loss_trace.back()) << "\nwrote " << tc_out << "\n";
        } else if (*train_sr_cmd) {
            ExperimentConfig config = resolve_config(tsr, seed);
            if (sr_shared) config.srcnn.shared = true;
            if (sr_epochs) config.srcnn.sgd.epochs = *sr_epochs;
            const MultispectralScene scene = require_scene(config);
            const SrcnnBank bank = train_srcnn_bank(scene, config.srcnn);
            fs::create_directories(sr_out);
            save_srcnn_bank(bank, scene, sr_out);
            for (std::size_t i = 0; i < bank.models.size(); ++i) {
                const std::string name = bank.models.size() == 1 ? "shared" : scene.bands[i].band_id;
                write_loss_trace(bank.loss_traces[i], fs::path(sr_out) / ("srcnn_loss_" + name + ".csv"));
            }
            out << "wrote " << bank.models.size() << " SRCNN model(s) to " << sr_out << "\n";
        } else if (*upscale_cmd) {
            const ExperimentConfig config = resolve_config(up, seed);
            const UpscaleMethod method = upscale_method_from_string(up_method);
            if (method == UpscaleMethod::Srcnn && up_factor < 2) throw Error("srcnn needs --factor >= 2");
            MultispectralScene scene = require_scene(config);
            SrcnnBank bank;
            if (method == UpscaleMethod::Srcnn) {
                if (up_models.empty()) throw Error("srcnn upscaling needs --models");
                bank = load_srcnn_bank(scene, up_models);
            }
            for (int s = 0; s < up_steps; ++s) scene = upscale_scene(scene, method, up_factor, &bank);
            const fs::path manifest = write_scene(scene, up_out);
            out << "wrote " << scene.width << "x" << scene.height << " scene to " << manifest.string() << "\n";
        } else if (*classify_cmd) {
            const ExperimentConfig config = resolve_config(cl, seed);
            const MultispectralScene scene = require_scene(config);
            const MlpModel model = load_mlp(cl_model);
            const ClassMap map = classify_scene(model, scene);
            write_class_map(map, cl_out);
            out << "wrote " << map.width << "x" << map.height << " class map to " << cl_out << "\n";
            if (!cl_truth.empty()) {
                const ClassMap pixel_truth = read_class_map(cl_truth);
                if (pixel_truth.width == 0 || scene.width % pixel_truth.width != 0 ||
                    scene.width / pixel_truth.width * pixel_truth.height != scene.height)
                    throw Error("truth map size must divide the scene size evenly");
                const ClassMap truth = block_truth(pixel_truth, scene.width / pixel_truth.width);
                const EvaluationReport eval = evaluate(map.labels, truth.labels, static_cast<int>(model.class_count()));
                out << "accuracy " << eval.accuracy << "\n";
                for (int c = 0; c < eval.confusion.classes; ++c)
                    out << "recall " << model.class_names[static_cast<std::size_t>(c)] << " " << eval.confusion.recall(c)
                        << "\n";
            }
        } else if (*psnr_cmd) {
            auto is_manifest = [](const std::string& p) { return fs::path(p).extension() == ".json"; };
            if (is_manifest(ps_prev) != is_manifest(ps_next)) throw Error("compare two PGMs or two manifests");
            if (is_manifest(ps_prev)) {
                const MultispectralScene a = load_scene(ps_prev);
                const MultispectralScene b = load_scene(ps_next);
                if (a.band_count() != b.band_count()) throw Error("scenes have different band counts");
                for (std::size_t i = 0; i < a.band_count(); ++i) {
                    const double v = a.width == b.width && a.height == b.height
                                         ? psnr(a.bands[i], b.bands[i])
                                         : chained_step_psnr(a.bands[i], b.bands[i], ps_factor);
                    out << a.bands[i].band_id << " " << fmt_db(v) << "\n";
                }
            } else {
                const BandRaster a = from_gray(read_pgm(ps_prev), "reference");
                const BandRaster b = from_gray(read_pgm(ps_next), "derived");
                const double v = a.width == b.width && a.height == b.height ? psnr(a, b)
                                                                            : chained_step_psnr(a, b, ps_factor);
                out << fmt_db(v) << "\n";
            }
        } else if (*experiment_cmd) {
            const ExperimentConfig config = resolve_config(ex, seed);
            const ExperimentResult result = run_experiment(config);
            out << "class maps: " << result.class_maps.size() << "\npsnr: " << result.psnr_csv.string()
                << "\nplot: " << result.psnr_plot.string() << "\n";
            if (!result.classification_csv.empty()) out << "classification: " << result.classification_csv.string() << "\n";
        } else if (*synth_cmd) {
            const SyntheticScene s = make_synthetic_scene(default_synthetic_spec(sy_width, sy_height, sy_noise, sy_seed));
            const fs::path dir = sy_out;
            write_scene(s.scene, dir / "scene");
            write_class_map(s.truth, dir / "truth.pgm");
            RegionFile regions;
            regions.regions = pure_training_regions(s.truth, sy_side, sy_per_class);
            write_regions(regions, dir / "regions.json");
            ExperimentConfig config;
            config.scene_manifest = "scene/scene.json";
            config.region_file = "regions.json";
            config.truth_map = "truth.pgm";
            config.output_dir = "out";
            config.srcnn = desk_srcnn_settings();
            std::ofstream(dir / "config.json") << config_to_json(config) << "\n";
            out << "wrote synthetic scene, truth, regions and config.json to " << dir.string() << "\n";
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace srnet
