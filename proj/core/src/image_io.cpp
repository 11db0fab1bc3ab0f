#include "lfaa/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

namespace lfaa {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

} // namespace

void write_png_gray(const std::string& path, const Grid2D& img, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw ValidationError("write_png_gray: bit_depth must be 8 or 16");
    if (img.rows() < 1 || img.cols() < 1)
        throw ValidationError("write_png_gray: empty image");
    if (!img.finite()) throw ValidationError("write_png_gray: non-finite samples");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw ValidationError("write_png_gray: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                              nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw NumericalError("write_png_gray: libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw NumericalError("write_png_gray: libpng failure on " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.cols(), img.rows(), bit_depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const double scale = bit_depth == 8 ? 255.0 : 65535.0;
    std::vector<png_byte> row(static_cast<size_t>(img.cols()) * (bit_depth / 8));
    for (int r = 0; r < img.rows(); ++r) {
        for (int c = 0; c < img.cols(); ++c) {
            const double v = std::clamp(img(r, c), 0.0, 1.0);
            const auto q = static_cast<unsigned>(std::lround(v * scale));
            if (bit_depth == 8) {
                row[c] = static_cast<png_byte>(q);
            } else {
                row[2 * c] = static_cast<png_byte>(q >> 8); // PNG is big-endian
                row[2 * c + 1] = static_cast<png_byte>(q & 0xff);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Grid2D read_png_gray(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw ValidationError("read_png_gray: cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                             nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw NumericalError("read_png_gray: libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ValidationError("read_png_gray: not a valid PNG: " + path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    // Normalize to 8/16-bit grayscale.
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(png, 1, -1, -1);
    if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const double scale = depth == 8 ? 255.0 : 65535.0;

    Grid2D img(h, w);
    std::vector<png_byte> row(static_cast<size_t>(w) * (depth / 8));
    for (int r = 0; r < h; ++r) {
        png_read_row(png, row.data(), nullptr);
        for (int c = 0; c < w; ++c) {
            unsigned q = depth == 8
                             ? row[c]
                             : (static_cast<unsigned>(row[2 * c]) << 8) | row[2 * c + 1];
            img(r, c) = q / scale;
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_pfm(const std::string& path, const Grid2D& img) {
    if (img.rows() < 1 || img.cols() < 1) throw ValidationError("write_pfm: empty image");
    if (!img.finite()) throw ValidationError("write_pfm: non-finite samples");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw ValidationError("write_pfm: cannot open " + path);

    // Negative scale marks little-endian.
    std::fprintf(fp.get(), "Pf\n%d %d\n-1.0\n", img.cols(), img.rows());
    std::vector<float> row(img.cols());
    for (int r = img.rows() - 1; r >= 0; --r) { // bottom-up
        for (int c = 0; c < img.cols(); ++c) row[c] = static_cast<float>(img(r, c));
        if (std::fwrite(row.data(), sizeof(float), row.size(), fp.get()) != row.size())
            throw NumericalError("write_pfm: short write on " + path);
    }
}

Grid2D read_pfm(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw ValidationError("read_pfm: cannot open " + path);

    char magic[3] = {};
    int w = 0, h = 0;
    double scale = 0.0;
    if (std::fscanf(fp.get(), "%2s %d %d %lf", magic, &w, &h, &scale) != 4 ||
        std::strcmp(magic, "Pf") != 0 || w < 1 || h < 1)
        throw ValidationError("read_pfm: bad header in " + path);
    if (scale >= 0.0)
        throw ValidationError("read_pfm: big-endian PFM unsupported: " + path);
    std::fgetc(fp.get()); // single whitespace after header

    Grid2D img(h, w);
    std::vector<float> row(w);
    for (int r = h - 1; r >= 0; --r) {
        if (std::fread(row.data(), sizeof(float), row.size(), fp.get()) != row.size())
            throw ValidationError("read_pfm: truncated data in " + path);
        for (int c = 0; c < w; ++c) img(r, c) = row[c];
    }
    return img;
}

} // namespace lfaa
