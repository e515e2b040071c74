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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sieval {

// Width/height pair for a 2D pixel grid. Pixels are addressed in raster
// order: index = row * width + col.
struct Extent {
    std::size_t width = 0;
    std::size_t height = 0;

    std::size_t area() const { return width * height; }
    std::size_t index(std::size_t row, std::size_t col) const { return row * width + col; }

    friend bool operator==(const Extent&, const Extent&) = default;
};

// Dense single-channel float32 image.
class Raster {
public:
    Raster() = default;

    Raster(std::size_t width, std::size_t height)
        : extent_{width, height}, data_(checked_area(width, height), 0.0f) {}

    Raster(std::size_t width, std::size_t height, std::vector<float> data)
        : extent_{width, height}, data_(std::move(data)) {
        if (data_.size() != checked_area(width, height))
            throw std::invalid_argument("raster: data size does not match dimensions");
    }

    static Raster filled(std::size_t width, std::size_t height, float value) {
        Raster r(width, height);
        for (float& v : r.data_) v = value;
        return r;
    }

    const Extent& extent() const { return extent_; }
    std::size_t width() const { return extent_.width; }
    std::size_t height() const { return extent_.height; }
    std::size_t size() const { return data_.size(); }

    float operator[](std::size_t i) const { return data_[i]; }
    float& operator[](std::size_t i) { return data_[i]; }
    float at(std::size_t row, std::size_t col) const { return data_[extent_.index(row, col)]; }
    float& at(std::size_t row, std::size_t col) { return data_[extent_.index(row, col)]; }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

private:
    static std::size_t checked_area(std::size_t width, std::size_t height) {
        if (width == 0 || height == 0)
            throw std::invalid_argument("raster: zero-sized image");
        return width * height;
    }

    Extent extent_;
    std::vector<float> data_;
};

// Saliency prediction with every value in [0, 1].
class SaliencyMap {
public:
    SaliencyMap() = default;

    explicit SaliencyMap(Raster raster) : raster_(std::move(raster)) {
        for (float v : raster_.data())
            if (!(v >= 0.0f && v <= 1.0f))
                throw std::invalid_argument("saliency map: value outside [0, 1]");
    }

    // Maps 8-bit intensities to value / 255.
    static SaliencyMap from_bytes(std::size_t width, std::size_t height,
                                  const std::vector<std::uint8_t>& bytes) {
        Raster r(width, height);
        if (bytes.size() != r.size())
            throw std::invalid_argument("saliency map: byte count does not match dimensions");
        for (std::size_t i = 0; i < bytes.size(); ++i)
            r[i] = static_cast<float>(bytes[i]) / 255.0f;
        return SaliencyMap(std::move(r));
    }

    const Extent& extent() const { return raster_.extent(); }
    std::size_t width() const { return raster_.width(); }
    std::size_t height() const { return raster_.height(); }
    std::size_t size() const { return raster_.size(); }
    float operator[](std::size_t i) const { return raster_[i]; }
    float at(std::size_t row, std::size_t col) const { return raster_.at(row, col); }
    const Raster& raster() const { return raster_; }

private:
    Raster raster_;
};

// Ground-truth mask with every value exactly 0 or 1.
class BinaryMask {
public:
    BinaryMask() = default;

    explicit BinaryMask(Raster raster) : raster_(std::move(raster)) {
        for (float v : raster_.data())
            if (v != 0.0f && v != 1.0f)
                throw std::invalid_argument("binary mask: value is neither 0 nor 1");
    }

    // Thresholds 8-bit intensities: byte >= threshold becomes foreground.
    static BinaryMask from_bytes(std::size_t width, std::size_t height,
                                 const std::vector<std::uint8_t>& bytes,
                                 std::uint8_t threshold = 128) {
        Raster r(width, height);
        if (bytes.size() != r.size())
            throw std::invalid_argument("binary mask: byte count does not match dimensions");
        for (std::size_t i = 0; i < bytes.size(); ++i)
            r[i] = bytes[i] >= threshold ? 1.0f : 0.0f;
        return BinaryMask(std::move(r));
    }

    const Extent& extent() const { return raster_.extent(); }
    std::size_t width() const { return raster_.width(); }
    std::size_t height() const { return raster_.height(); }
    std::size_t size() const { return raster_.size(); }
    float operator[](std::size_t i) const { return raster_[i]; }
    float at(std::size_t row, std::size_t col) const { return raster_.at(row, col); }
    bool is_salient(std::size_t i) const { return raster_[i] != 0.0f; }
    const Raster& raster() const { return raster_; }

    std::size_t salient_count() const {
        std::size_t n = 0;
        for (float v : raster_.data()) n += v != 0.0f;
        return n;
    }

private:
    Raster raster_;
};

inline void require_same_extent(const Extent& a, const Extent& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace sieval
