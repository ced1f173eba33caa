#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pegservo/errors.hpp"
#include "pegservo/geometry.hpp"
#include "pegservo/random.hpp"

namespace pegservo {

/// 8-bit RGB image, row-major, interleaved channels.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    static constexpr int channels = 3;

    Image() = default;
    Image(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w <= 0 || h <= 0) {
            throw InvalidArgumentError("image dimensions must be positive");
        }
        data.assign(static_cast<std::size_t>(w) * h * channels, fill);
    }

    std::uint8_t& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    friend bool operator==(const Image&, const Image&) = default;
};

/// Scalar score map, row-major.
struct Heatmap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Heatmap() = default;
    Heatmap(int w, int h, double fill = 0.0) : width(w), height(h) {
        if (w <= 0 || h <= 0) {
            throw InvalidArgumentError("heatmap dimensions must be positive");
        }
        values.assign(static_cast<std::size_t>(w) * h, fill);
    }

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

struct HeatmapParams {
    double sigma = 3.0;
};

/// Target map exp(-|p - p*|^2 / (2 sigma^2)) sampled at every integer pixel.
inline Heatmap gaussian_heatmap(const PixelPoint& p_star, const HeatmapParams& params, int width,
                                int height) {
    if (!(params.sigma > 0.0)) {
        throw InvalidArgumentError("heatmap sigma must be positive");
    }
    Heatmap h(width, height);
    const double inv = 1.0 / (2.0 * params.sigma * params.sigma);
    for (int y = 0; y < height; ++y) {
        const double dy = y - p_star.y;
        for (int x = 0; x < width; ++x) {
            const double dx = x - p_star.x;
            h.at(x, y) = std::exp(-(dx * dx + dy * dy) * inv);
        }
    }
    return h;
}

struct HeatmapPeak {
    PixelPoint point;
    double value = 0.0;
};

/// Pixel with the largest value; ties resolve to the smallest row-major index.
inline HeatmapPeak argmax_point(const Heatmap& h) {
    if (h.values.empty()) {
        throw InvalidArgumentError("argmax of an empty heatmap");
    }
    const auto it = std::max_element(h.values.begin(), h.values.end());
    const auto idx = static_cast<int>(it - h.values.begin());
    return {{static_cast<double>(idx % h.width), static_cast<double>(idx / h.width)}, *it};
}

inline double heatmap_mse(const Heatmap& a, const Heatmap& b) {
    if (a.width != b.width || a.height != b.height) {
        throw DimensionMismatchError("heatmap sizes differ");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.values.size());
}

/// BT.601 integer luma.
inline std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b) / 1000);
}

/// Blends `overlay` over `render` with the grayscale of `alpha_source` as alpha.
inline Image composite_overlay(const Image& render, const Image& overlay, const Image& alpha_source) {
    if (render.width != overlay.width || render.height != overlay.height ||
        render.width != alpha_source.width || render.height != alpha_source.height) {
        throw DimensionMismatchError("overlay compositing needs equally sized images");
    }
    Image out(render.width, render.height);
    for (int y = 0; y < render.height; ++y) {
        for (int x = 0; x < render.width; ++x) {
            const int a = luma(alpha_source.at(x, y, 0), alpha_source.at(x, y, 1), alpha_source.at(x, y, 2));
            for (int c = 0; c < Image::channels; ++c) {
                const int blended = render.at(x, y, c) * (255 - a) + overlay.at(x, y, c) * a;
                // round half up; blended is non-negative
                out.at(x, y, c) = static_cast<std::uint8_t>((2 * blended + 255) / 510);
            }
        }
    }
    return out;
}

inline Image flip_horizontal(const Image& img) {
    Image out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < Image::channels; ++c) {
                out.at(img.width - 1 - x, y, c) = img.at(x, y, c);
            }
        }
    }
    return out;
}

inline Image crop(const Image& img, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > img.width || y0 + h > img.height) {
        throw InvalidArgumentError("crop window exceeds the image");
    }
    Image out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < Image::channels; ++c) {
                out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
            }
        }
    }
    return out;
}

/// Mean filter over a k x k window with clamped borders.
inline Image box_blur(const Image& img, int kernel) {
    if (kernel < 1 || kernel % 2 == 0) {
        throw InvalidArgumentError("box blur kernel must be odd and positive");
    }
    const int r = kernel / 2;
    const int n = kernel * kernel;
    Image out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < Image::channels; ++c) {
                int sum = 0;
                for (int dy = -r; dy <= r; ++dy) {
                    const int yy = std::clamp(y + dy, 0, img.height - 1);
                    for (int dx = -r; dx <= r; ++dx) {
                        sum += img.at(std::clamp(x + dx, 0, img.width - 1), yy, c);
                    }
                }
                out.at(x, y, c) = static_cast<std::uint8_t>((2 * sum + n) / (2 * n));
            }
        }
    }
    return out;
}

/// Bilinear resize with pixel-center alignment. Same-size resize is the identity.
inline Image resize_bilinear(const Image& img, int width, int height) {
    if (width == img.width && height == img.height) {
        return img;
    }
    Image out(width, height);
    const double sx = static_cast<double>(img.width) / width;
    const double sy = static_cast<double>(img.height) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            for (int c = 0; c < Image::channels; ++c) {
                const double top = (1 - wx) * img.at(x0, y0, c) + wx * img.at(x1, y0, c);
                const double bottom = (1 - wx) * img.at(x0, y1, c) + wx * img.at(x1, y1, c);
                out.at(x, y, c) = static_cast<std::uint8_t>(std::lround((1 - wy) * top + wy * bottom));
            }
        }
    }
    return out;
}

struct AugmentParams {
    bool crop_enabled = true;
    /// Crop side as a fraction of the shorter image side.
    double crop_fraction = 0.875;
    double flip_probability = 0.5;
    double blur_probability = 0.5;
    int output_size = 224;
    HeatmapParams heatmap;
};

struct AugmentResult {
    Image image;
    std::vector<PixelPoint> keypoints;
    std::vector<Heatmap> heatmaps;
};

/// Training augmentation: random square crop, random horizontal flip, box
/// blur (kernel 3 or 5) on the image only, then resize to output_size.
/// Keypoints follow the same geometric transform and the target heatmaps are
/// regenerated around the transformed keypoints.
inline AugmentResult augment(const Image& image, const std::vector<PixelPoint>& keypoints,
                             const AugmentParams& params, Rng& rng) {
    Image img = image;
    std::vector<PixelPoint> kps = keypoints;

    if (params.crop_enabled) {
        const int side = static_cast<int>(std::lround(params.crop_fraction * std::min(img.width, img.height)));
        if (side > img.width || side > img.height || side <= 0) {
            throw InvalidArgumentError("crop larger than the image");
        }
        const int x0 = std::uniform_int_distribution<int>(0, img.width - side)(rng);
        const int y0 = std::uniform_int_distribution<int>(0, img.height - side)(rng);
        img = crop(img, x0, y0, side, side);
        for (auto& p : kps) {
            p = {p.x - x0, p.y - y0};
        }
    }
    if (bernoulli(rng, params.flip_probability)) {
        img = flip_horizontal(img);
        for (auto& p : kps) {
            p.x = img.width - 1 - p.x;
        }
    }
    if (bernoulli(rng, params.blur_probability)) {
        const int kernel = bernoulli(rng, 0.5) ? 3 : 5;
        img = box_blur(img, kernel);
    }

    const double sx = static_cast<double>(params.output_size) / img.width;
    const double sy = static_cast<double>(params.output_size) / img.height;
    img = resize_bilinear(img, params.output_size, params.output_size);
    AugmentResult result{std::move(img), {}, {}};
    for (const auto& p : kps) {
        const PixelPoint q{(p.x + 0.5) * sx - 0.5, (p.y + 0.5) * sy - 0.5};
        result.keypoints.push_back(q);
        result.heatmaps.push_back(gaussian_heatmap(q, params.heatmap, params.output_size, params.output_size));
    }
    return result;
}

/// Heatmap values in [0,1] scaled to an 8-bit gray image (for export).
inline Image heatmap_to_image(const Heatmap& h) {
    Image out(h.width, h.height);
    for (int y = 0; y < h.height; ++y) {
        for (int x = 0; x < h.width; ++x) {
            const auto v = static_cast<std::uint8_t>(std::lround(std::clamp(h.at(x, y), 0.0, 1.0) * 255.0));
            for (int c = 0; c < Image::channels; ++c) {
                out.at(x, y, c) = v;
            }
        }
    }
    return out;
}

}  // namespace pegservo
