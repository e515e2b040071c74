// Copyright 2026 The sieval authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sieval/image_io.hpp"
#include "sieval/raster.hpp"

namespace testutil {

// 6x6 mask with an L-shaped component at (1,1),(1,2),(2,1) and a single
// pixel at (4,4). Boxes: rows 1-2 x cols 1-2 (area 4, 3 object pixels) and
// (4,4) (area 1); background 31 pixels; separable alpha = 31/5 = 6.2.
inline sieval::BinaryMask p1_mask() {
    sieval::Raster r(6, 6);
    r.at(1, 1) = r.at(1, 2) = r.at(2, 1) = 1.0f;
    r.at(4, 4) = 1.0f;
    return sieval::BinaryMask(std::move(r));
}

inline std::vector<std::uint8_t> p1_box_union_bytes() {
    std::vector<std::uint8_t> bytes(36, 0);
    bytes[1 * 6 + 1] = bytes[1 * 6 + 2] = bytes[2 * 6 + 1] = bytes[2 * 6 + 2] = 255;
    bytes[4 * 6 + 4] = 255;
    return bytes;
}

// 10x10 mask with a single pixel at (1,1) and a 2x2 square at rows 5-6 x
// cols 5-6. Boxes of area 1 and 4; separable alpha = 95/5 = 19.
inline sieval::BinaryMask p2_mask() {
    sieval::Raster r(10, 10);
    r.at(1, 1) = 1.0f;
    r.at(5, 5) = r.at(5, 6) = r.at(6, 5) = r.at(6, 6) = 1.0f;
    return sieval::BinaryMask(std::move(r));
}

// Misses the single pixel entirely, hits the square exactly.
inline sieval::SaliencyMap p2_pred_a() {
    sieval::Raster r(10, 10);
    r.at(5, 5) = r.at(5, 6) = r.at(6, 5) = r.at(6, 6) = 1.0f;
    return sieval::SaliencyMap(std::move(r));
}

// Hits the single pixel, hits three of the square's four pixels.
inline sieval::SaliencyMap p2_pred_b() {
    sieval::Raster r(10, 10);
    r.at(1, 1) = 1.0f;
    r.at(5, 5) = r.at(5, 6) = r.at(6, 5) = 1.0f;
    return sieval::SaliencyMap(std::move(r));
}

inline sieval::SaliencyMap pred_from_mask(const sieval::BinaryMask& mask) {
    return sieval::SaliencyMap(mask.raster());
}

inline sieval::SaliencyMap pred_of(std::size_t width, std::size_t height,
                                   std::vector<float> values) {
    return sieval::SaliencyMap(sieval::Raster(width, height, std::move(values)));
}

inline sieval::BinaryMask mask_of(std::size_t width, std::size_t height,
                                  std::vector<float> values) {
    return sieval::BinaryMask(sieval::Raster(width, height, std::move(values)));
}

// Bernoulli mask; may have any K including 0.
inline sieval::BinaryMask random_mask(std::mt19937& rng, std::size_t width, std::size_t height,
                                      double foreground_rate = 0.3) {
    std::bernoulli_distribution fore(foreground_rate);
    sieval::Raster r(width, height);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = fore(rng) ? 1.0f : 0.0f;
    return sieval::BinaryMask(std::move(r));
}

// Single connected component traced by a random 4-connected walk.
inline sieval::BinaryMask random_single_component_mask(std::mt19937& rng, std::size_t width,
                                                       std::size_t height) {
    sieval::Raster r(width, height);
    std::uniform_int_distribution<std::size_t> row_dist(0, height - 1);
    std::uniform_int_distribution<std::size_t> col_dist(0, width - 1);
    std::uniform_int_distribution<int> step(0, 3);
    std::uniform_int_distribution<std::size_t> len_dist(1, width * height / 4);

    std::size_t row = row_dist(rng), col = col_dist(rng);
    const std::size_t steps = len_dist(rng);
    r.at(row, col) = 1.0f;
    for (std::size_t i = 0; i < steps; ++i) {
        switch (step(rng)) {
            case 0: if (row + 1 < height) ++row; break;
            case 1: if (row > 0) --row; break;
            case 2: if (col + 1 < width) ++col; break;
            case 3: if (col > 0) --col; break;
        }
        r.at(row, col) = 1.0f;
    }
    return sieval::BinaryMask(std::move(r));
}

// One to five random rectangles; K >= 1 but overlaps may merge components.
inline sieval::BinaryMask random_multiobject_mask(std::mt19937& rng, std::size_t width,
                                                  std::size_t height) {
    sieval::Raster r(width, height);
    std::uniform_int_distribution<std::size_t> count_dist(1, 5);
    std::uniform_int_distribution<std::size_t> row_dist(0, height - 1);
    std::uniform_int_distribution<std::size_t> col_dist(0, width - 1);
    const std::size_t rects = count_dist(rng);
    for (std::size_t k = 0; k < rects; ++k) {
        std::size_t r0 = row_dist(rng), r1 = row_dist(rng);
        std::size_t c0 = col_dist(rng), c1 = col_dist(rng);
        if (r0 > r1) std::swap(r0, r1);
        if (c0 > c1) std::swap(c0, c1);
        r1 = std::min(r1, r0 + height / 3);
        c1 = std::min(c1, c0 + width / 3);
        for (std::size_t row = r0; row <= r1; ++row)
            for (std::size_t col = c0; col <= c1; ++col) r.at(row, col) = 1.0f;
    }
    return sieval::BinaryMask(std::move(r));
}

// Prediction on the byte/255 grid.
inline sieval::SaliencyMap random_quantized_pred(std::mt19937& rng, std::size_t width,
                                                 std::size_t height) {
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<std::uint8_t> bytes(width * height);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(byte(rng));
    return sieval::SaliencyMap::from_bytes(width, height, bytes);
}

// Prediction with arbitrary float values in [0, 1].
inline sieval::SaliencyMap random_float_pred(std::mt19937& rng, std::size_t width,
                                             std::size_t height) {
    std::uniform_real_distribution<float> value(0.0f, 1.0f);
    sieval::Raster r(width, height);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = value(rng);
    return sieval::SaliencyMap(std::move(r));
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / (tag + "-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Minimal PNG writer for exercising the reader; color_type and bit_depth
// use the PNG header encoding (0 = gray, 2 = rgb).
inline void write_png(const std::filesystem::path& path, std::size_t width, std::size_t height,
                      const std::vector<std::uint8_t>& payload, int color_type = 0,
                      int bit_depth = 8) {
    const std::size_t channels = color_type == 2 ? 3 : 1;
    const std::size_t stride = width * channels * (bit_depth / 8);
    if (payload.size() != stride * height)
        throw std::runtime_error("write_png: payload size mismatch");

    FILE* file = std::fopen(path.c_str(), "wb");
    if (!file) throw std::runtime_error("write_png: cannot open " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(file);
        throw std::runtime_error("write_png: encoder failure");
    }

    png_init_io(png, file);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_bytep> rows(height);
    for (std::size_t r = 0; r < height; ++r)
        rows[r] = const_cast<png_bytep>(payload.data() + r * stride);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(file);
}

inline void write_mask_pgm(const std::filesystem::path& path, const sieval::BinaryMask& mask) {
    sieval::GrayImage img;
    img.width = mask.width();
    img.height = mask.height();
    img.pixels.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        img.pixels[i] = mask.is_salient(i) ? 255 : 0;
    sieval::write_pgm(path, img);
}

inline void write_pred_pgm(const std::filesystem::path& path, const sieval::SaliencyMap& pred) {
    sieval::GrayImage img;
    img.width = pred.width();
    img.height = pred.height();
    img.pixels.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(std::lround(pred[i] * 255.0f));
    sieval::write_pgm(path, img);
}

}  // namespace testutil
