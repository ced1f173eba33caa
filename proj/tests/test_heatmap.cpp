#include <gtest/gtest.h>

#include <cmath>

#include "pegservo/heatmap.hpp"

using namespace pegservo;

namespace {

Image random_image(int w, int h, Rng& rng) {
    Image img(w, h);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& v : img.data) {
        v = static_cast<std::uint8_t>(byte(rng));
    }
    return img;
}

Image solid(int w, int h, std::uint8_t v) { return Image(w, h, v); }

}  // namespace

TEST(GaussianHeatmap, PeakIsExactlyOne) {
    const Heatmap h = gaussian_heatmap({50, 60}, {3.0}, 224, 224);
    EXPECT_EQ(h.at(50, 60), 1.0);
}

TEST(GaussianHeatmap, ValueAtOneSigma) {
    const Heatmap h = gaussian_heatmap({50, 60}, {3.0}, 224, 224);
    EXPECT_NEAR(h.at(53, 60), std::exp(-0.5), 1e-12);
    EXPECT_NEAR(h.at(50, 57), 0.606531, 1e-6);
}

TEST(GaussianHeatmap, MatchesDirectFormulaEverywhere) {
    const PixelPoint p{17.3, 40.8};
    const double sigma = 2.5;
    const Heatmap h = gaussian_heatmap(p, {sigma}, 64, 48);
    for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 64; ++x) {
            const double d2 = (x - p.x) * (x - p.x) + (y - p.y) * (y - p.y);
            ASSERT_NEAR(h.at(x, y), std::exp(-d2 / (2 * sigma * sigma)), 1e-15);
            ASSERT_GE(h.at(x, y), 0.0);
            ASSERT_LE(h.at(x, y), 1.0);
        }
    }
}

TEST(GaussianHeatmap, OffImagePeakIsStillDefined) {
    const Heatmap h = gaussian_heatmap({-10, -10}, {3.0}, 8, 8);
    EXPECT_NEAR(h.at(0, 0), std::exp(-200.0 / 18.0), 1e-15);
}

TEST(GaussianHeatmap, RadiallySymmetric) {
    const Heatmap h = gaussian_heatmap({100, 100}, {3.0}, 224, 224);
    const int offsets[][2] = {{3, 4}, {4, 3}, {-3, 4}, {3, -4}, {-4, -3}, {5, 0}, {0, -5}, {-5, 0}};
    for (const auto& o : offsets) {
        EXPECT_NEAR(h.at(100 + o[0], 100 + o[1]), h.at(105, 100), 1e-12);
    }
}

TEST(ArgmaxPoint, InvertsGaussianHeatmap) {
    const HeatmapPeak peak = argmax_point(gaussian_heatmap({50, 60}, {3.0}, 224, 224));
    EXPECT_EQ(peak.point, (PixelPoint{50, 60}));
    EXPECT_EQ(peak.value, 1.0);
}

TEST(ArgmaxPoint, EveryIntegralPeakRoundTrips) {
    for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 40; ++x) {
            ASSERT_EQ(argmax_point(gaussian_heatmap({double(x), double(y)}, {3.0}, 40, 32)).point,
                      (PixelPoint{double(x), double(y)}));
        }
    }
}

TEST(ArgmaxPoint, TieBreakSmallestRowMajorIndex) {
    Heatmap h(224, 224);
    h.at(3, 4) = 0.7;
    h.at(10, 2) = 0.7;
    EXPECT_EQ(argmax_point(h).point, (PixelPoint{10, 2}));
}

TEST(ArgmaxPoint, AllZeroGivesOrigin) {
    const HeatmapPeak peak = argmax_point(Heatmap(5, 7));
    EXPECT_EQ(peak.point, (PixelPoint{0, 0}));
    EXPECT_EQ(peak.value, 0.0);
}

TEST(HeatmapMse, HandArithmetic) {
    Heatmap a(2, 1);
    Heatmap b(2, 1);
    b.at(0, 0) = 1.0;
    EXPECT_DOUBLE_EQ(heatmap_mse(a, b), 0.5);
    EXPECT_DOUBLE_EQ(heatmap_mse(b, a), 0.5);
    EXPECT_DOUBLE_EQ(heatmap_mse(a, a), 0.0);
}

TEST(HeatmapMse, SymmetricAndZeroOnSelf) {
    const Heatmap a = gaussian_heatmap({3, 3}, {2.0}, 16, 16);
    const Heatmap b = gaussian_heatmap({9, 5}, {2.0}, 16, 16);
    EXPECT_EQ(heatmap_mse(a, a), 0.0);
    EXPECT_EQ(heatmap_mse(a, b), heatmap_mse(b, a));
    EXPECT_GT(heatmap_mse(a, b), 0.0);
}

TEST(HeatmapMse, DimensionMismatchThrows) {
    EXPECT_THROW(heatmap_mse(Heatmap(2, 2), Heatmap(2, 3)), DimensionMismatchError);
}

TEST(Luma, IntegerWeights) {
    EXPECT_EQ(luma(255, 255, 255), 255);
    EXPECT_EQ(luma(0, 0, 0), 0);
    EXPECT_EQ(luma(255, 0, 0), 76);   // 299*255/1000 = 76.245
    EXPECT_EQ(luma(0, 255, 0), 149);  // 587*255/1000 = 149.685
    EXPECT_EQ(luma(0, 0, 255), 29);   // 114*255/1000 = 29.07
}

TEST(CompositeOverlay, BlackAlphaKeepsRender) {
    Rng rng(1);
    const Image render = random_image(16, 9, rng);
    const Image overlay = random_image(16, 9, rng);
    EXPECT_EQ(composite_overlay(render, overlay, solid(16, 9, 0)), render);
}

TEST(CompositeOverlay, IdempotentUnderBlackAlpha) {
    Rng rng(2);
    const Image render = random_image(8, 8, rng);
    const Image overlay = random_image(8, 8, rng);
    const Image once = composite_overlay(render, overlay, solid(8, 8, 0));
    EXPECT_EQ(composite_overlay(once, overlay, solid(8, 8, 0)), once);
}

TEST(CompositeOverlay, WhiteAlphaGivesOverlay) {
    Rng rng(3);
    const Image render = random_image(16, 9, rng);
    const Image overlay = random_image(16, 9, rng);
    EXPECT_EQ(composite_overlay(render, overlay, solid(16, 9, 255)), overlay);
}

TEST(CompositeOverlay, HandBlend) {
    const Image out = composite_overlay(solid(1, 1, 100), solid(1, 1, 200), solid(1, 1, 128));
    for (int c = 0; c < 3; ++c) {
        EXPECT_EQ(out.at(0, 0, c), 150);
    }
}

TEST(CompositeOverlay, MatchesFloatingPointOracle) {
    Rng rng(4);
    const Image render = random_image(32, 32, rng);
    const Image overlay = random_image(32, 32, rng);
    const Image alpha = random_image(32, 32, rng);
    const Image out = composite_overlay(render, overlay, alpha);
    for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
            const int a = (299 * alpha.at(x, y, 0) + 587 * alpha.at(x, y, 1) + 114 * alpha.at(x, y, 2)) / 1000;
            for (int c = 0; c < 3; ++c) {
                const double expect = std::round((render.at(x, y, c) * (255.0 - a) + overlay.at(x, y, c) * a) / 255.0);
                ASSERT_EQ(out.at(x, y, c), static_cast<int>(expect));
            }
        }
    }
}

TEST(CompositeOverlay, DimensionMismatchThrows) {
    EXPECT_THROW(composite_overlay(solid(2, 2, 0), solid(2, 3, 0), solid(2, 2, 0)), DimensionMismatchError);
}

TEST(FlipHorizontal, TwiceIsIdentity) {
    Rng rng(5);
    const Image img = random_image(13, 7, rng);
    EXPECT_EQ(flip_horizontal(flip_horizontal(img)), img);
    EXPECT_EQ(flip_horizontal(img).at(0, 3, 1), img.at(12, 3, 1));
}

TEST(BoxBlur, ConstantImageUnchanged) {
    const Image img = solid(10, 10, 77);
    EXPECT_EQ(box_blur(img, 3), img);
    EXPECT_EQ(box_blur(img, 5), img);
}

TEST(ResizeBilinear, SameSizeIsIdentity) {
    Rng rng(6);
    const Image img = random_image(20, 11, rng);
    EXPECT_EQ(resize_bilinear(img, 20, 11), img);
}

TEST(Augment, NoOpParamsAreIdentityUpToResize) {
    Rng rng(7);
    const Image img = random_image(224, 224, rng);
    AugmentParams p;
    p.crop_enabled = false;
    p.flip_probability = 0.0;
    p.blur_probability = 0.0;
    const AugmentResult r = augment(img, {{50, 60}, {100, 20}}, p, rng);
    EXPECT_EQ(r.image, img);
    EXPECT_EQ(r.keypoints[0], (PixelPoint{50, 60}));
    EXPECT_EQ(argmax_point(r.heatmaps[1]).point, (PixelPoint{100, 20}));
}

TEST(Augment, ResizeScalesKeypointsWithPixelCenters) {
    Rng rng(8);
    const Image img = random_image(448, 448, rng);
    AugmentParams p;
    p.crop_enabled = false;
    p.flip_probability = 0.0;
    p.blur_probability = 0.0;
    const AugmentResult r = augment(img, {{100.5, 40.5}}, p, rng);
    EXPECT_EQ(r.image.width, 224);
    EXPECT_DOUBLE_EQ(r.keypoints[0].x, 50.0);
    EXPECT_DOUBLE_EQ(r.keypoints[0].y, 20.0);
}

TEST(Augment, ForcedFlipMovesPeak) {
    Rng rng(9);
    const Image img = random_image(224, 224, rng);
    AugmentParams p;
    p.crop_enabled = false;
    p.flip_probability = 1.0;
    p.blur_probability = 0.0;
    const AugmentResult r = augment(img, {{50, 60}}, p, rng);
    EXPECT_EQ(argmax_point(r.heatmaps[0]).point, (PixelPoint{173, 60}));
    EXPECT_EQ(r.image, flip_horizontal(img));
}

TEST(Augment, BlurTouchesImageOnly) {
    Rng rng(10);
    const Image img = random_image(224, 224, rng);
    AugmentParams p;
    p.crop_enabled = false;
    p.flip_probability = 0.0;
    p.blur_probability = 1.0;
    const AugmentResult r = augment(img, {{30, 30}}, p, rng);
    EXPECT_TRUE(r.image == box_blur(img, 3) || r.image == box_blur(img, 5));
    EXPECT_EQ(argmax_point(r.heatmaps[0]).point, (PixelPoint{30, 30}));
}

TEST(Augment, BlurFiresAboutHalfTheTimeWithBothKernels) {
    Rng rng(11);
    const Image img = random_image(16, 16, rng);
    AugmentParams p;
    p.crop_enabled = false;
    p.flip_probability = 0.0;
    p.output_size = 16;
    const Image k3 = box_blur(img, 3);
    const Image k5 = box_blur(img, 5);
    int n3 = 0;
    int n5 = 0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        const Image out = augment(img, {}, p, rng).image;
        n3 += out == k3;
        n5 += out == k5;
    }
    const double sigma = std::sqrt(0.25 * n);
    EXPECT_NEAR(n3 + n5, 0.5 * n, 3 * sigma);
    EXPECT_NEAR(n3, n5, 4 * std::sqrt(0.5 * n));
}

TEST(Augment, CropKeepsKeypointOnSameImageContent) {
    Rng rng(12);
    const Image img = random_image(300, 200, rng);
    AugmentParams p;
    p.flip_probability = 0.0;
    p.blur_probability = 0.0;
    p.crop_fraction = 1.0;
    p.output_size = 200;
    for (int i = 0; i < 20; ++i) {
        const AugmentResult r = augment(img, {{150, 100}}, p, rng);
        const int x = static_cast<int>(r.keypoints[0].x);
        const int y = static_cast<int>(r.keypoints[0].y);
        ASSERT_DOUBLE_EQ(r.keypoints[0].x, x);
        for (int c = 0; c < 3; ++c) {
            EXPECT_EQ(r.image.at(x, y, c), img.at(150, 100, c));
        }
    }
}

TEST(Augment, CropLargerThanImageThrows) {
    Rng rng(13);
    AugmentParams p;
    p.crop_fraction = 1.5;
    EXPECT_THROW(augment(solid(10, 10, 0), {}, p, rng), InvalidArgumentError);
}

TEST(HeatmapToImage, ScalesToBytes) {
    const Image img = heatmap_to_image(gaussian_heatmap({1, 1}, {1.0}, 3, 3));
    EXPECT_EQ(img.at(1, 1, 0), 255);
    EXPECT_EQ(img.at(0, 1, 2), static_cast<int>(std::lround(std::exp(-0.5) * 255)));
}
