#include "srnet/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "srnet/error.hpp"

namespace srnet {

double mse(const BandRaster& f, const BandRaster& g) {
    if (f.width != g.width || f.height != g.height)
        throw Error("mse: images are " + std::to_string(f.width) + "x" + std::to_string(f.height) + " and " +
                    std::to_string(g.width) + "x" + std::to_string(g.height));
    double sum = 0.0;
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        const double d = 255.0 * (f.samples[i] - g.samples[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(f.samples.size());
}

double psnr(const BandRaster& f, const BandRaster& g) {
    const double error = mse(f, g);
    if (error <= kMseZeroFloor) return kPsnrInfinite;
    return 10.0 * std::log10(255.0 * 255.0 / error);
}

BandRaster downsample_block_mean(const BandRaster& raster, int factor) {
    if (factor < 1) throw Error("downsample factor must be >= 1, got " + std::to_string(factor));
    if (factor == 1) return raster;
    const int w = raster.width / factor;
    const int h = raster.height / factor;
    if (w < 1 || h < 1) throw Error("raster smaller than one downsample block");
    BandRaster out(raster.band_id, w, h);
    const double norm = 1.0 / (static_cast<double>(factor) * factor);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx) s += raster.at(x * factor + dx, y * factor + dy);
            out.at(x, y) = s * norm;
        }
    return out;
}

double chained_step_psnr(const BandRaster& previous, const BandRaster& next, int factor) {
    return psnr(previous, downsample_block_mean(next, factor));
}

void check_report(const PsnrReport& report) {
    std::set<std::tuple<std::string, std::string, int>> seen;
    for (const auto& row : report.rows) {
        if (!seen.emplace(row.band_id, row.method, row.step).second)
            throw Error("duplicate PSNR row for " + row.band_id + "/" + row.method + "/" + std::to_string(row.step));
        if (!(row.psnr_db > 0.0)) throw Error("PSNR values must be positive");
        if (row.step < 1) throw Error("PSNR step must be >= 1");
    }
}

PsnrReport chained_psnr(const MultispectralScene& originals, const std::string& method, const StepUpscaler& upscaler,
                        int steps) {
    if (steps < 1) throw Error("chained_psnr needs at least one step");
    check_scene(originals);
    PsnrReport report;
    for (std::size_t b = 0; b < originals.band_count(); ++b) {
        BandRaster previous = originals.bands[b];
        for (int step = 1; step <= steps; ++step) {
            BandRaster next = upscaler(b, previous);
            report.rows.push_back({previous.band_id, method, step, chained_step_psnr(previous, next)});
            previous = std::move(next);
        }
    }
    return report;
}

std::string report_csv(const PsnrReport& report) {
    std::string out = "band,method,step,psnr_db\n";
    char value[64];
    for (const auto& row : report.rows) {
        if (std::isinf(row.psnr_db))
            std::snprintf(value, sizeof value, "inf");
        else
            std::snprintf(value, sizeof value, "%.6f", row.psnr_db);
        out += row.band_id + "," + row.method + "," + std::to_string(row.step) + "," + value + "\n";
    }
    return out;
}

void write_report_csv(const PsnrReport& report, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << report_csv(report);
}

PsnrReport read_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "band,method,step,psnr_db")
        throw Error(path.string() + " is missing the PSNR report header");
    PsnrReport report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        PsnrRow row;
        std::string step, value;
        if (!std::getline(ss, row.band_id, ',') || !std::getline(ss, row.method, ',') || !std::getline(ss, step, ',') ||
            !std::getline(ss, value))
            throw Error("malformed PSNR row: " + line);
        try {
            row.step = std::stoi(step);
            row.psnr_db = value == "inf" ? kPsnrInfinite : std::stod(value);
        } catch (const std::exception&) {
            throw Error("malformed PSNR row: " + line);
        }
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace srnet
