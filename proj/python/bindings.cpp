#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "srnet/error.hpp"
#include "srnet/interp.hpp"
#include "srnet/metrics.hpp"
#include "srnet/model_io.hpp"
#include "srnet/pipeline.hpp"
#include "srnet/srcnn.hpp"
#include "srnet/synthetic.hpp"

namespace py = pybind11;
using namespace srnet;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

BandRaster to_raster(const Array& image, const std::string& band_id = "B") {
    if (image.ndim() != 2) throw py::value_error("expected a 2-D array");
    const auto h = static_cast<int>(image.shape(0));
    const auto w = static_cast<int>(image.shape(1));
    BandRaster r(band_id, w, h, std::vector<double>(image.data(), image.data() + image.size()));
    return r;
}

Array to_array(const BandRaster& r) {
    Array out({r.height, r.width});
    std::copy(r.samples.begin(), r.samples.end(), out.mutable_data());
    return out;
}

BandRaster checked(const Array& image) {
    BandRaster r = to_raster(image);
    check_raster(r);
    return r;
}

py::dict experiment_summary(const ExperimentResult& r) {
    py::list psnr;
    for (const auto& row : r.psnr.rows)
        psnr.append(py::dict(py::arg("band") = row.band_id, py::arg("method") = row.method,
                             py::arg("step") = row.step, py::arg("psnr_db") = row.psnr_db));
    py::list classification;
    for (const auto& row : r.classification)
        classification.append(py::dict(py::arg("method") = row.method, py::arg("step") = row.step,
                                       py::arg("accuracy") = row.accuracy, py::arg("recall") = row.recall));
    py::dict maps;
    for (const auto& [key, path] : r.class_maps) maps[py::str(key)] = path.string();
    py::dict d;
    d["psnr"] = psnr;
    d["classification"] = classification;
    d["class_maps"] = maps;
    d["psnr_csv"] = r.psnr_csv.string();
    d["psnr_plot"] = r.psnr_plot.string();
    d["metadata"] = r.metadata.string();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of srnet: interpolation, PSNR, SRCNN and the experiment runner.";
    py::register_exception<Error>(m, "SrnetError", PyExc_ValueError);

    m.def("keys_kernel", &keys_kernel, py::arg("s"), py::arg("a") = -0.5);
    m.def(
        "solve_bicubic_patch",
        [](std::array<double, 4> f, std::array<double, 4> fx, std::array<double, 4> fy, std::array<double, 4> fxy) {
            const BicubicPatchCoeffs c = solve_bicubic_patch(CornerData{f, fx, fy, fxy});
            Array out({4, 4});
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) out.mutable_at(i, j) = c.a[i][j];
            return out;
        },
        py::arg("f"), py::arg("fx"), py::arg("fy"), py::arg("fxy"),
        "Coefficients a[i][j] of sum a_ij x^i y^j on the unit square; corners ordered (0,0),(1,0),(0,1),(1,1).");

    m.def(
        "upscale",
        [](const Array& image, int factor, const std::string& method) {
            const BandRaster r = checked(image);
            if (method == "bicubic") return to_array(upscale_bicubic(r, factor));
            if (method == "bilinear") return to_array(upscale_bilinear(r, factor));
            throw py::value_error("method must be 'bicubic' or 'bilinear'; use SrcnnModel.upscale for srcnn");
        },
        py::arg("image"), py::arg("factor") = 3, py::arg("method") = "bicubic");
    m.def(
        "downsample_block_mean", [](const Array& image, int factor) { return to_array(downsample_block_mean(checked(image), factor)); },
        py::arg("image"), py::arg("factor") = 3);
    m.def(
        "mse", [](const Array& a, const Array& b) { return mse(to_raster(a), to_raster(b)); }, py::arg("reference"),
        py::arg("derived"), "Mean squared error in 8-bit units.");
    m.def(
        "psnr", [](const Array& a, const Array& b) { return psnr(to_raster(a), to_raster(b)); }, py::arg("reference"),
        py::arg("derived"), "PSNR in dB with peak 255; inf for identical images.");

    m.def(
        "synthetic_scene",
        [](int width, int height, double noise, std::uint64_t seed) {
            const SyntheticScene s = make_synthetic_scene(default_synthetic_spec(width, height, noise, seed));
            py::array_t<double> bands({static_cast<py::ssize_t>(s.scene.band_count()), static_cast<py::ssize_t>(height),
                                       static_cast<py::ssize_t>(width)});
            double* dst = bands.mutable_data();
            for (const auto& b : s.scene.bands) dst = std::copy(b.samples.begin(), b.samples.end(), dst);
            py::array_t<int> truth({height, width});
            std::copy(s.truth.labels.begin(), s.truth.labels.end(), truth.mutable_data());
            std::vector<std::string> ids;
            for (const auto& b : s.scene.bands) ids.push_back(b.band_id);
            return py::make_tuple(bands, truth, ids, default_class_names());
        },
        py::arg("width") = 128, py::arg("height") = 128, py::arg("noise") = 0.02, py::arg("seed") = 0,
        "Returns (bands[b, h, w], truth[h, w], band_ids, class_names).");

    py::class_<SrcnnModel>(m, "SrcnnModel")
        .def_static("load", &load_srcnn, py::arg("path"))
        .def("save", [](const SrcnnModel& model, const fs::path& path) { save_srcnn(model, path); }, py::arg("path"))
        .def("forward", [](const SrcnnModel& model, const Array& image) { return to_array(srcnn_forward(model, checked(image))); },
             py::arg("image"), "Applies the network to an image already at the target size.")
        .def("upscale",
             [](const SrcnnModel& model, const Array& image, int factor) {
                 return to_array(upscale_srcnn(model, checked(image), factor));
             },
             py::arg("image"), py::arg("factor") = 3)
        .def_property_readonly("parameter_count", [](const SrcnnModel& model) { return param_count(model.layers); });

    m.def(
        "train_srcnn",
        [](const std::vector<Array>& images, int epochs, std::uint64_t seed) {
            std::vector<BandRaster> bands;
            for (const auto& img : images) bands.push_back(checked(img));
            SrcnnSettings settings = desk_srcnn_settings();
            settings.sgd.epochs = static_cast<std::size_t>(epochs);
            SrcnnTraining t = train_srcnn_on_bands(bands, settings, seed);
            return py::make_tuple(std::move(t.model), t.loss_trace);
        },
        py::arg("images"), py::arg("epochs") = 80, py::arg("seed") = 2,
        "Trains the desk-scale SRCNN on full-resolution images; returns (model, per-epoch loss).");

    m.def(
        "run_experiment",
        [](const fs::path& config_path, std::optional<fs::path> output_dir, std::optional<std::uint64_t> seed) {
            ExperimentConfig config = load_config(config_path);
            if (output_dir) config.output_dir = *output_dir;
            if (seed) override_seeds(config, *seed);
            ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(config);
            }
            return experiment_summary(r);
        },
        py::arg("config"), py::arg("output_dir") = py::none(), py::arg("seed") = py::none());

    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli_dispatch(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
