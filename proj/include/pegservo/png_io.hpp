#pragma once

#include <cstdio>
#include <memory>
#include <string>

#include <png.h>

#include "pegservo/errors.hpp"
#include "pegservo/heatmap.hpp"

namespace pegservo {

/// Reads any PNG as 8-bit RGB (palette, gray and 16-bit inputs are expanded,
/// alpha is dropped).
inline Image read_png(const std::string& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str())) {
        throw IoError("cannot read PNG '" + path + "': " + img.message);
    }
    img.format = PNG_FORMAT_RGB;
    Image out(static_cast<int>(img.width), static_cast<int>(img.height));
    if (!png_image_finish_read(&img, nullptr, out.data.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw IoError("cannot decode PNG '" + path + "': " + msg);
    }
    return out;
}

inline void write_png(const std::string& path, const Image& image) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width);
    img.height = static_cast<png_uint_32>(image.height);
    img.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&img, path.c_str(), 0, image.data.data(), 0, nullptr)) {
        throw IoError("cannot write PNG '" + path + "': " + img.message);
    }
}

}  // namespace pegservo
