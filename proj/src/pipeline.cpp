#include "srnet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "srnet/error.hpp"
#include "srnet/interp.hpp"
#include "srnet/model_io.hpp"
#include "srnet/synthetic.hpp"

namespace srnet {

using json = nlohmann::json;

const char* to_string(SrcnnInit init) { return init == SrcnnInit::Gaussian ? "gaussian" : "identity"; }

SrcnnInit srcnn_init_from_string(const std::string& name) {
    if (name == "gaussian") return SrcnnInit::Gaussian;
    if (name == "identity") return SrcnnInit::Identity;
    throw Error("unknown SRCNN init '" + name + "'");
}

SrcnnSettings desk_srcnn_settings() {
    SrcnnSettings s;
    s.geometry.k1 = 5;
    s.geometry.n1 = 16;
    s.geometry.n2 = 8;
    s.sgd = {0.03, 1, 80, 0};
    s.shared = true;
    return s;
}

SrcnnModel init_srcnn(const SrcnnSettings& settings, std::uint64_t seed) {
    SrcnnModel model = make_srcnn(settings.geometry, seed);
    if (settings.init == SrcnnInit::Gaussian) return model;
    if (model.activations[0] == Activation::Sigmoid || model.activations[1] == Activation::Sigmoid)
        throw Error("identity init needs relu or linear hidden activations");
    // Feature 0 of each layer carries the input unchanged (inputs are >= 0, so
    // relu passes them); the output reads only that feature.
    auto& first = model.layers[0];
    for (int ky = 0; ky < first.kernel_size; ++ky)
        for (int kx = 0; kx < first.kernel_size; ++kx)
            first.weight(0, 0, ky, kx) = ky == first.radius() && kx == first.radius() ? 1.0 : 0.0;
    auto& second = model.layers[1];
    for (int c = 0; c < second.in_channels; ++c)
        for (int ky = 0; ky < second.kernel_size; ++ky)
            for (int kx = 0; kx < second.kernel_size; ++kx)
                second.weight(0, c, ky, kx) = c == 0 && ky == second.radius() && kx == second.radius() ? 1.0 : 0.0;
    auto& last = model.layers[2];
    std::fill(last.weights.begin(), last.weights.end(), 0.0);
    last.weight(0, 0, last.radius(), last.radius()) = 1.0;
    return model;
}

SrcnnTraining train_srcnn_on_bands(std::span<const BandRaster> bands, const SrcnnSettings& settings,
                                   std::uint64_t seed) {
    SrPairSet pairs;
    pairs.patch_size = settings.patch_size;
    for (std::size_t b = 0; b < bands.size(); ++b) {
        SrPairSet part = make_training_pairs(bands[b], settings.factor, settings.patch_size, settings.stride, seed + b);
        std::move(part.pairs.begin(), part.pairs.end(), std::back_inserter(pairs.pairs));
    }
    if (pairs.pairs.empty()) throw Error("no SRCNN training pairs");

    SrcnnTraining out;
    out.model = init_srcnn(settings, seed);
    const SrcnnModel shape = out.model;
    auto objective = [&](std::span<const double> params, std::span<const std::size_t> batch) {
        return srcnn_batch_loss(shape, params, pairs, batch);
    };
    SgdConfig sgd = settings.sgd;
    sgd.seed = seed;
    SgdResult trained;
    try {
        trained = sgd_train(objective, pack_params(out.model.layers), sgd, pairs.pairs.size());
    } catch (const Error& e) {
        throw Error(std::string("SRCNN training diverged: ") + e.what());
    }
    unpack_params(trained.params, out.model.layers);
    out.loss_trace = std::move(trained.epoch_losses);
    return out;
}

SrcnnBank train_srcnn_bank(const MultispectralScene& scene, const SrcnnSettings& settings) {
    check_scene(scene);
    SrcnnBank bank;
    if (settings.shared) {
        SrcnnTraining t = train_srcnn_on_bands(scene.bands, settings, settings.seed);
        bank.models.push_back(std::move(t.model));
        bank.loss_traces.push_back(std::move(t.loss_trace));
        return bank;
    }
    for (std::size_t b = 0; b < scene.band_count(); ++b) {
        SrcnnTraining t = train_srcnn_on_bands(std::span(&scene.bands[b], 1), settings, settings.seed + 1000 * b);
        bank.models.push_back(std::move(t.model));
        bank.loss_traces.push_back(std::move(t.loss_trace));
    }
    return bank;
}

namespace {

fs::path bank_file(const fs::path& dir, const std::string& name) { return dir / ("srcnn_" + name + ".json"); }

}  // namespace

void save_srcnn_bank(const SrcnnBank& bank, const MultispectralScene& scene, const fs::path& dir) {
    if (bank.models.size() == 1) {
        save_srcnn(bank.models[0], bank_file(dir, "shared"));
        return;
    }
    if (bank.models.size() != scene.band_count()) throw Error("SRCNN bank does not match the scene's bands");
    for (std::size_t b = 0; b < bank.models.size(); ++b)
        save_srcnn(bank.models[b], bank_file(dir, scene.bands[b].band_id));
}

SrcnnBank load_srcnn_bank(const MultispectralScene& scene, const fs::path& dir) {
    SrcnnBank bank;
    if (fs::exists(bank_file(dir, "shared"))) {
        bank.models.push_back(load_srcnn(bank_file(dir, "shared")));
        return bank;
    }
    for (const auto& band : scene.bands) bank.models.push_back(load_srcnn(bank_file(dir, band.band_id)));
    return bank;
}

const char* to_string(UpscaleMethod method) {
    switch (method) {
        case UpscaleMethod::Bilinear: return "bilinear";
        case UpscaleMethod::Bicubic: return "bicubic";
        case UpscaleMethod::Srcnn: return "srcnn";
    }
    return "?";
}

UpscaleMethod upscale_method_from_string(const std::string& name) {
    if (name == "bilinear") return UpscaleMethod::Bilinear;
    if (name == "bicubic") return UpscaleMethod::Bicubic;
    if (name == "srcnn") return UpscaleMethod::Srcnn;
    throw Error("unknown upscale method '" + name + "'");
}

MultispectralScene upscale_scene(const MultispectralScene& scene, UpscaleMethod method, int factor,
                                 const SrcnnBank* bank) {
    if (method == UpscaleMethod::Srcnn && (bank == nullptr || bank->models.empty()))
        throw Error("srcnn upscaling needs trained models");
    std::vector<BandRaster> bands;
    for (std::size_t b = 0; b < scene.band_count(); ++b) {
        const BandRaster& band = scene.bands[b];
        switch (method) {
            case UpscaleMethod::Bilinear: bands.push_back(upscale_bilinear(band, factor)); break;
            case UpscaleMethod::Bicubic: bands.push_back(upscale_bicubic(band, factor)); break;
            case UpscaleMethod::Srcnn: bands.push_back(upscale_srcnn(bank->for_band(b), band, factor)); break;
        }
    }
    return make_scene(std::move(bands));
}

// --- config -----------------------------------------------------------------

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

fs::path resolve(const fs::path& base, const std::string& value) {
    const fs::path p(value);
    return p.is_absolute() ? p : base / p;
}

}  // namespace

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("config " + path.string() + " is not valid JSON: " + e.what());
    }
    const fs::path base = path.parent_path();
    ExperimentConfig config;
    try {
        if (doc.contains("scene")) config.scene_manifest = resolve(base, doc.at("scene").get<std::string>());
        if (doc.contains("regions")) config.region_file = resolve(base, doc.at("regions").get<std::string>());
        if (doc.contains("truth") && !doc.at("truth").is_null())
            config.truth_map = resolve(base, doc.at("truth").get<std::string>());
        if (doc.contains("output_dir")) config.output_dir = resolve(base, doc.at("output_dir").get<std::string>());
        read_opt(doc, "steps", config.steps);
        if (doc.contains("methods")) {
            config.methods.clear();
            for (const auto& m : doc.at("methods")) config.methods.push_back(upscale_method_from_string(m.get<std::string>()));
        }
        if (doc.contains("classifier")) {
            const auto& c = doc.at("classifier");
            read_opt(c, "hidden_dims", config.classifier.hidden_dims);
            if (c.contains("hidden_activation"))
                config.classifier.hidden_activation = activation_from_string(c.at("hidden_activation").get<std::string>());
            read_opt(c, "max_iter", config.classifier.max_iter);
            read_opt(c, "grad_tol", config.classifier.grad_tol);
            read_opt(c, "seed", config.classifier.seed);
        }
        if (doc.contains("srcnn")) {
            const auto& s = doc.at("srcnn");
            auto& g = config.srcnn.geometry;
            read_opt(s, "k1", g.k1);
            read_opt(s, "n1", g.n1);
            read_opt(s, "k2", g.k2);
            read_opt(s, "n2", g.n2);
            read_opt(s, "k3", g.k3);
            if (s.contains("activations")) {
                const auto names = s.at("activations").get<std::vector<std::string>>();
                if (names.size() != 3) throw Error("srcnn.activations needs three entries");
                for (std::size_t i = 0; i < 3; ++i) g.activations[i] = activation_from_string(names[i]);
            }
            if (s.contains("padding")) g.padding = padding_from_string(s.at("padding").get<std::string>());
            if (s.contains("init")) config.srcnn.init = srcnn_init_from_string(s.at("init").get<std::string>());
            read_opt(s, "learning_rate", config.srcnn.sgd.learning_rate);
            read_opt(s, "batch_size", config.srcnn.sgd.batch_size);
            read_opt(s, "epochs", config.srcnn.sgd.epochs);
            read_opt(s, "patch_size", config.srcnn.patch_size);
            read_opt(s, "stride", config.srcnn.stride);
            read_opt(s, "factor", config.srcnn.factor);
            read_opt(s, "shared", config.srcnn.shared);
            read_opt(s, "seed", config.srcnn.seed);
        }
    } catch (const json::exception& e) {
        throw Error("config " + path.string() + ": " + e.what());
    }
    return config;
}

std::string config_to_json(const ExperimentConfig& config) {
    const auto& g = config.srcnn.geometry;
    json methods = json::array();
    for (auto m : config.methods) methods.push_back(to_string(m));
    json doc = {
        {"scene", config.scene_manifest.string()},
        {"regions", config.region_file.string()},
        {"truth", config.truth_map ? json(config.truth_map->string()) : json(nullptr)},
        {"output_dir", config.output_dir.string()},
        {"steps", config.steps},
        {"methods", methods},
        {"classifier",
         {{"hidden_dims", config.classifier.hidden_dims},
          {"hidden_activation", to_string(config.classifier.hidden_activation)},
          {"max_iter", config.classifier.max_iter},
          {"grad_tol", config.classifier.grad_tol},
          {"seed", config.classifier.seed}}},
        {"srcnn",
         {{"k1", g.k1},
          {"n1", g.n1},
          {"k2", g.k2},
          {"n2", g.n2},
          {"k3", g.k3},
          {"activations", {to_string(g.activations[0]), to_string(g.activations[1]), to_string(g.activations[2])}},
          {"padding", to_string(g.padding)},
          {"init", to_string(config.srcnn.init)},
          {"learning_rate", config.srcnn.sgd.learning_rate},
          {"batch_size", config.srcnn.sgd.batch_size},
          {"epochs", config.srcnn.sgd.epochs},
          {"patch_size", config.srcnn.patch_size},
          {"stride", config.srcnn.stride},
          {"factor", config.srcnn.factor},
          {"shared", config.srcnn.shared},
          {"seed", config.srcnn.seed}}},
    };
    return doc.dump(2);
}

void validate_config(const ExperimentConfig& config) {
    if (config.steps < 1) throw Error("steps must be >= 1");
    if (config.methods.empty()) throw Error("at least one upscale method is required");
    if (config.scene_manifest.empty() || !fs::exists(config.scene_manifest))
        throw Error("scene manifest not found: " + config.scene_manifest.string());
    if (config.region_file.empty() || !fs::exists(config.region_file))
        throw Error("region file not found: " + config.region_file.string());
    if (config.truth_map && !fs::exists(*config.truth_map))
        throw Error("truth map not found: " + config.truth_map->string());
    check_sgd_config(config.srcnn.sgd);
    if (config.srcnn.patch_size < 1 || config.srcnn.stride < 1 || config.srcnn.factor < 2)
        throw Error("srcnn patch size and stride must be positive and factor >= 2");
}

void override_seeds(ExperimentConfig& config, std::uint64_t seed) {
    config.classifier.seed = seed;
    config.srcnn.seed = seed;
    config.srcnn.sgd.seed = seed;
}

// --- experiment -------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_text(const std::string& text, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

// Runs one named stage; errors are re-raised with the stage name.
template <typename F>
auto stage(const char* name, json& timings, F&& body) {
    const auto t0 = Clock::now();
    try {
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            timings[name] = std::chrono::duration<double>(Clock::now() - t0).count();
        } else {
            auto result = body();
            timings[name] = std::chrono::duration<double>(Clock::now() - t0).count();
            return result;
        }
    } catch (const std::exception& e) {
        throw Error(std::string("stage '") + name + "' failed: " + e.what());
    }
}

ClassificationRow score_map(const ClassMap& predicted, const ClassMap& pixel_truth, int upscale, UpscaleMethod method,
                            int step) {
    const ClassMap truth = block_truth(pixel_truth, upscale);
    if (truth.width != predicted.width || truth.height != predicted.height)
        throw Error("truth and class map dimensions differ");
    const int classes = static_cast<int>(pixel_truth.palette.size());
    const EvaluationReport eval = evaluate(predicted.labels, truth.labels, classes);
    ClassificationRow row{to_string(method), step, predicted.width, predicted.height, eval.accuracy, {}};
    for (int c = 0; c < classes; ++c) row.recall.push_back(eval.confusion.recall(c));
    return row;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const fs::path out_dir = config.output_dir;
    fs::create_directories(out_dir);
    const fs::path failure_marker = out_dir / "FAILED";
    fs::remove(failure_marker);

    ExperimentResult result;
    json timings = json::object();
    try {
        stage("validate", timings, [&] { validate_config(config); });
        const MultispectralScene scene = stage("load_scene", timings, [&] { return load_scene(config.scene_manifest); });
        const RegionFile regions = stage("load_regions", timings, [&] { return load_regions(config.region_file); });
        std::optional<ClassMap> truth;
        if (config.truth_map) {
            truth = stage("load_truth", timings, [&] {
                ClassMap map = read_class_map(*config.truth_map);
                if (map.width != scene.width || map.height != scene.height)
                    throw Error("truth map does not match the scene dimensions");
                return map;
            });
        }

        // The classifier is trained once and reused for every method and step.
        const MlpModel classifier = stage("train_classifier", timings, [&] {
            const FeatureSet data =
                label_regions(scene, regions.regions, FeatureMode::Pooled2x2, regions.class_names);
            ClassifierOptions opts;
            opts.hidden_dims = config.classifier.hidden_dims;
            opts.hidden_activation = config.classifier.hidden_activation;
            opts.scg.max_iter = config.classifier.max_iter;
            opts.scg.grad_tol = config.classifier.grad_tol;
            opts.seed = config.classifier.seed;
            ClassifierTraining t = train_classifier(data, opts);
            result.classifier_trace = out_dir / "reports" / "classifier_loss.csv";
            write_loss_trace(t.loss_trace, result.classifier_trace);
            result.classifier_model = out_dir / "models" / "classifier.json";
            save_mlp(t.model, result.classifier_model);
            return t.model;
        });

        SrcnnBank bank;
        const bool wants_srcnn =
            std::find(config.methods.begin(), config.methods.end(), UpscaleMethod::Srcnn) != config.methods.end();
        if (wants_srcnn) {
            bank = stage("train_srcnn", timings, [&] { return train_srcnn_bank(scene, config.srcnn); });
            save_srcnn_bank(bank, scene, out_dir / "models");
            for (std::size_t i = 0; i < bank.models.size(); ++i) {
                const std::string name = bank.models.size() == 1 ? "shared" : scene.bands[i].band_id;
                result.srcnn_models.push_back(out_dir / "models" / ("srcnn_" + name + ".json"));
                result.srcnn_traces.push_back(out_dir / "reports" / ("srcnn_loss_" + name + ".csv"));
                write_loss_trace(bank.loss_traces[i], result.srcnn_traces.back());
            }
        }

        const ClassMap base_map = stage("classify_step0", timings, [&] { return classify_scene(classifier, scene); });
        for (UpscaleMethod method : config.methods) {
            const std::string name = to_string(method);
            stage(("upscale_" + name).c_str(), timings, [&] {
                MultispectralScene current = scene;
                int upscale = 1;
                for (int step = 0; step <= config.steps; ++step) {
                    if (step > 0) {
                        MultispectralScene next = upscale_scene(current, method, 3, &bank);
                        for (std::size_t b = 0; b < scene.band_count(); ++b)
                            result.psnr.rows.push_back({scene.bands[b].band_id, name, step,
                                                        chained_step_psnr(current.bands[b], next.bands[b])});
                        current = std::move(next);
                        upscale *= 3;
                    }
                    const ClassMap map = step == 0 ? base_map : classify_scene(classifier, current);
                    const fs::path path = out_dir / "maps" / (name + "_step" + std::to_string(step) + ".pgm");
                    write_class_map(map, path);
                    result.class_maps.emplace_back(name + "/step" + std::to_string(step), path);
                    if (truth) result.classification.push_back(score_map(map, *truth, upscale, method, step));
                }
            });
        }

        // Rows ordered by method (config order), band, step.
        PsnrReport ordered;
        for (UpscaleMethod method : config.methods)
            for (const auto& band : scene.bands)
                for (const auto& row : result.psnr.rows)
                    if (row.method == to_string(method) && row.band_id == band.band_id) ordered.rows.push_back(row);
        result.psnr = std::move(ordered);

        stage("write_reports", timings, [&] {
            result.psnr_csv = out_dir / "reports" / "psnr.csv";
            write_report_csv(result.psnr, result.psnr_csv);
            result.psnr_plot = out_dir / "plots" / "psnr.svg";
            render_psnr_plot(result.psnr, result.psnr_plot);
            if (truth) {
                std::string csv = "method,step,width,height,accuracy";
                for (const auto& cls : regions.class_names) csv += ",recall_" + cls;
                csv += "\n";
                for (const auto& row : result.classification) {
                    csv += row.method + "," + std::to_string(row.step) + "," + std::to_string(row.width) + "," +
                           std::to_string(row.height) + "," + format_double(row.accuracy);
                    for (double r : row.recall) csv += "," + format_double(r);
                    csv += "\n";
                }
                result.classification_csv = out_dir / "reports" / "classification.csv";
                write_text(csv, result.classification_csv);
            }
        });

        json meta = {{"config", json::parse(config_to_json(config))},
                     {"seeds",
                      {{"classifier", config.classifier.seed},
                       {"srcnn", config.srcnn.seed},
                       {"srcnn_sgd", config.srcnn.sgd.seed}}},
                     {"durations_s", timings}};
        result.metadata = out_dir / "run.meta";
        write_text(meta.dump(2) + "\n", result.metadata);
    } catch (const std::exception& e) {
        write_text(std::string(e.what()) + "\n", failure_marker);
        throw Error(e.what());
    }
    return result;
}

// --- plot -------------------------------------------------------------------

PlotSummary render_psnr_plot(const PsnrReport& report, const fs::path& path) {
    if (report.rows.empty()) throw Error("cannot plot an empty PSNR report");

    struct Curve {
        std::string method;
        std::string band;
        std::vector<std::pair<int, double>> points;
    };
    std::vector<Curve> curves;
    std::vector<std::string> methods;
    std::vector<std::string> bands;
    std::vector<std::string> notes;
    int max_step = 1;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& row : report.rows) {
        max_step = std::max(max_step, row.step);
        if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) methods.push_back(row.method);
        if (std::find(bands.begin(), bands.end(), row.band_id) == bands.end()) bands.push_back(row.band_id);
        if (std::isinf(row.psnr_db)) {
            notes.push_back(row.method + " " + row.band_id + " step " + std::to_string(row.step) + ": inf");
            continue;
        }
        auto it = std::find_if(curves.begin(), curves.end(),
                               [&](const Curve& c) { return c.method == row.method && c.band == row.band_id; });
        if (it == curves.end()) {
            curves.push_back({row.method, row.band_id, {}});
            it = curves.end() - 1;
        }
        it->points.emplace_back(row.step, row.psnr_db);
        lo = std::min(lo, row.psnr_db);
        hi = std::max(hi, row.psnr_db);
    }
    if (curves.empty()) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1.0) {
        lo -= 0.5;
        hi += 0.5;
    }

    const double W = 760, H = 480, left = 70, right = 200, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    auto sx = [&](double step) { return left + (max_step == 1 ? 0.5 : (step - 1) / (max_step - 1)) * pw; };
    auto sy = [&](double v) { return top + (1.0 - (v - lo) / (hi - lo)) * ph; };
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    static const char* dashes[] = {"", "6,3", "2,2", "8,3,2,3"};

    std::ostringstream svg;
    char buf[256];
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\" "
                  "font-family=\"sans-serif\" font-size=\"12\">\n",
                  W, H, W, H);
    svg << buf;
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n", left,
                  top, pw, ph);
    svg << buf;
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">upscaling step (3x each)</text>\n";
    svg << "<text x=\"18\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 18 " << top + ph / 2
        << ")\" text-anchor=\"middle\">PSNR (dB)</text>\n";
    for (int s = 1; s <= max_step; ++s) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%d</text>\n", sx(s),
                      top + ph + 18, s);
        svg << buf;
    }
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.2f</text>\n", left - 6,
                      sy(v) + 4, v);
        svg << buf;
    }

    for (const auto& curve : curves) {
        const auto band_idx = static_cast<std::size_t>(std::find(bands.begin(), bands.end(), curve.band) - bands.begin());
        const auto method_idx =
            static_cast<std::size_t>(std::find(methods.begin(), methods.end(), curve.method) - methods.begin());
        svg << "<polyline class=\"curve\" data-method=\"" << curve.method << "\" data-band=\"" << curve.band
            << "\" fill=\"none\" stroke=\"" << palette[band_idx % 10] << "\" stroke-width=\"1.5\"";
        if (method_idx % 4 != 0) svg << " stroke-dasharray=\"" << dashes[method_idx % 4] << "\"";
        svg << " points=\"";
        for (const auto& [step, value] : curve.points) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(step), sy(value));
            svg << buf;
        }
        svg << "\"/>\n";
    }

    // Legend: colours are bands, dash patterns are methods.
    double ly = top + 10;
    for (std::size_t b = 0; b < bands.size(); ++b, ly += 16) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                      W - right + 15, ly, W - right + 40, ly, palette[b % 10], W - right + 46, ly + 4,
                      bands[b].c_str());
        svg << buf;
    }
    for (std::size_t m = 0; m < methods.size(); ++m, ly += 16) {
        svg << "<line class=\"legend-method\" x1=\"" << W - right + 15 << "\" y1=\"" << ly << "\" x2=\""
            << W - right + 40 << "\" y2=\"" << ly << "\" stroke=\"black\"";
        if (m % 4 != 0) svg << " stroke-dasharray=\"" << dashes[m % 4] << "\"";
        svg << "/><text x=\"" << W - right + 46 << "\" y=\"" << ly + 4 << "\">" << methods[m] << "</text>\n";
    }
    for (const auto& note : notes) {
        ly += 14;
        svg << "<text class=\"annotation\" x=\"" << W - right + 15 << "\" y=\"" << ly << "\" font-size=\"10\">" << note
            << "</text>\n";
    }
    svg << "</svg>\n";
    write_text(svg.str(), path);
    return {static_cast<int>(curves.size()), static_cast<int>(notes.size())};
}

}  // namespace srnet
