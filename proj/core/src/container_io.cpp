#include "lfaa/container_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "lfaa/image_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace lfaa {

namespace {
Grid2D view_image(const LightField4D& lf, int s, int t) {
    Grid2D g(lf.height(), lf.width());
    for (int v = 0; v < lf.height(); ++v)
        for (int u = 0; u < lf.width(); ++u) g(v, u) = lf.at(u, v, s, t);
    return g;
}
} // namespace

void write_light_field(const std::string& dir, const LightField4D& lf,
                       const ContainerWriteOptions& opts) {
    if (opts.bit_depth != 8 && opts.bit_depth != 16 && opts.bit_depth != 32)
        throw ValidationError("write_light_field: bit_depth must be 8, 16, or 32");

    fs::create_directories(dir);

    const char* ext = opts.bit_depth == 32 ? ".pfm" : ".png";
    std::vector<std::string> files;
    for (int t = 0; t < lf.views_t(); ++t)
        for (int s = 0; s < lf.views_s(); ++s) {
            char name[64];
            std::snprintf(name, sizeof(name), "view_t%03d_s%03d%s", t, s, ext);
            files.emplace_back(name);
            const Grid2D img = view_image(lf, s, t);
            const std::string path = (fs::path(dir) / name).string();
            if (opts.bit_depth == 32)
                write_pfm(path, img);
            else
                write_png_gray(path, img, opts.bit_depth);
        }

    json manifest;
    manifest["views_s"] = lf.views_s();
    manifest["views_t"] = lf.views_t();
    manifest["width"] = lf.width();
    manifest["height"] = lf.height();
    manifest["bit_depth"] = opts.bit_depth;
    const DisparityRange range =
        lf.disparity_hint() ? *lf.disparity_hint() : DisparityRange(0.0, 0.0);
    manifest["disparity_min"] = range.d_min;
    manifest["disparity_max"] = range.d_max;
    manifest["files"] = files;

    std::ofstream os(fs::path(dir) / "manifest.json");
    if (!os) throw ValidationError("write_light_field: cannot write manifest in " + dir);
    os << manifest.dump(2) << '\n';
}

LightField4D read_light_field(const std::string& dir) {
    std::ifstream is(fs::path(dir) / "manifest.json");
    if (!is) throw ValidationError("read_light_field: no manifest.json in " + dir);
    json manifest;
    try {
        is >> manifest;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("read_light_field: bad manifest: ") + e.what());
    }

    int views_s, views_t, width, height;
    double d_min, d_max;
    std::vector<std::string> files;
    try {
        views_s = manifest.at("views_s").get<int>();
        views_t = manifest.at("views_t").get<int>();
        width = manifest.at("width").get<int>();
        height = manifest.at("height").get<int>();
        d_min = manifest.at("disparity_min").get<double>();
        d_max = manifest.at("disparity_max").get<double>();
        files = manifest.at("files").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("read_light_field: missing manifest field: ") +
                              e.what());
    }

    if (views_s < 1 || views_t < 1 || width < 1 || height < 1)
        throw ValidationError("read_light_field: invalid dimensions in manifest");
    if (files.size() != static_cast<size_t>(views_s) * views_t)
        throw ValidationError("read_light_field: file count does not match view count");

    LightField4D lf(width, height, views_s, views_t);
    lf.disparity_hint() = DisparityRange(d_min, d_max);

    size_t i = 0;
    for (int t = 0; t < views_t; ++t)
        for (int s = 0; s < views_s; ++s, ++i) {
            const fs::path path = fs::path(dir) / files[i];
            const Grid2D img = path.extension() == ".pfm" ? read_pfm(path.string())
                                                          : read_png_gray(path.string());
            if (img.rows() != height || img.cols() != width)
                throw ValidationError("read_light_field: view " + files[i] +
                                      " has wrong dimensions");
            for (int v = 0; v < height; ++v)
                for (int u = 0; u < width; ++u) lf.at(u, v, s, t) = img(v, u);
        }
    return lf;
}

} // namespace lfaa
