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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <ranges>
#include <stdexcept>
#include <string>
#include <vector>

#include "sieval/raster.hpp"

namespace sieval {

enum class Connectivity { four = 4, eight = 8 };

enum class AlphaKind { separable, composite, fixed };

// Selects how the background frame is weighted relative to the object
// frames. separable derives the weight from the partition geometry,
// composite drops the background term, fixed pins it to a constant.
struct AlphaMode {
    AlphaKind kind = AlphaKind::separable;
    double value = 0.0;  // used when kind == fixed

    static AlphaMode separable() { return {AlphaKind::separable, 0.0}; }
    static AlphaMode composite() { return {AlphaKind::composite, 0.0}; }
    static AlphaMode fixed(double v) {
        if (!(v >= 0.0)) throw std::invalid_argument("alpha mode: fixed value must be >= 0");
        return {AlphaKind::fixed, v};
    }

    std::string name() const {
        switch (kind) {
            case AlphaKind::separable: return "separable";
            case AlphaKind::composite: return "composite";
            case AlphaKind::fixed: return "fixed";
        }
        return "separable";
    }
};

// Connected-component labeling of a binary mask. Label 0 is background;
// components are numbered 1..component_count in raster-scan order of their
// first pixel.
struct ComponentLabeling {
    Extent extent;
    std::vector<std::uint32_t> labels;
    std::size_t component_count = 0;
    std::vector<std::size_t> component_sizes;  // indexed by label - 1
};

inline ComponentLabeling label_components(const BinaryMask& mask,
                                          Connectivity connectivity = Connectivity::eight) {
    const Extent ext = mask.extent();
    ComponentLabeling out;
    out.extent = ext;
    out.labels.assign(ext.area(), 0);

    const std::ptrdiff_t w = static_cast<std::ptrdiff_t>(ext.width);
    const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(ext.height);
    std::vector<std::size_t> stack;
    std::uint32_t next_label = 0;

    for (std::size_t seed = 0; seed < out.labels.size(); ++seed) {
        if (!mask.is_salient(seed) || out.labels[seed] != 0) continue;
        ++next_label;
        std::size_t size = 0;
        stack.clear();
        stack.push_back(seed);
        out.labels[seed] = next_label;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++size;
            const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(p) / w;
            const std::ptrdiff_t col = static_cast<std::ptrdiff_t>(p) % w;
            for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
                for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    if (connectivity == Connectivity::four && dr != 0 && dc != 0) continue;
                    const std::ptrdiff_t nr = row + dr;
                    const std::ptrdiff_t nc = col + dc;
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                    const std::size_t q = static_cast<std::size_t>(nr * w + nc);
                    if (!mask.is_salient(q) || out.labels[q] != 0) continue;
                    out.labels[q] = next_label;
                    stack.push_back(q);
                }
            }
        }
        out.component_sizes.push_back(size);
    }
    out.component_count = next_label;
    return out;
}

// Minimal bounding box of one connected component. Bounds are inclusive.
struct Frame {
    std::size_t id = 0;  // 1-based, raster order
    std::size_t row_min = 0, row_max = 0;
    std::size_t col_min = 0, col_max = 0;
    std::size_t box_area = 0;
    std::size_t object_pixels = 0;
};

// Image decomposition into object frames plus the background remainder.
// box_cover marks pixels inside at least one frame box, so the background
// region is its complement even when boxes overlap.
struct Partition {
    Extent extent;
    std::vector<Frame> frames;
    std::vector<std::uint8_t> box_cover;
    std::size_t background_area = 0;
    double alpha = 0.0;
    AlphaMode mode;
    bool degenerate = false;  // no frames survived; image is all background
};

inline Partition build_partition(const ComponentLabeling& labeling,
                                 AlphaMode mode = AlphaMode::separable(),
                                 std::size_t min_area = 0) {
    Partition part;
    part.extent = labeling.extent;
    part.mode = mode;
    part.box_cover.assign(labeling.extent.area(), 0);

    const std::size_t n = labeling.component_count;
    constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
    std::vector<Frame> boxes(n);
    for (std::size_t k = 0; k < n; ++k) boxes[k].row_min = unset;

    const std::size_t w = labeling.extent.width;
    for (std::size_t i = 0; i < labeling.labels.size(); ++i) {
        const std::uint32_t label = labeling.labels[i];
        if (label == 0) continue;
        Frame& f = boxes[label - 1];
        const std::size_t row = i / w;
        const std::size_t col = i % w;
        if (f.row_min == unset) {
            f.row_min = f.row_max = row;
            f.col_min = f.col_max = col;
        } else {
            f.row_min = std::min(f.row_min, row);
            f.row_max = std::max(f.row_max, row);
            f.col_min = std::min(f.col_min, col);
            f.col_max = std::max(f.col_max, col);
        }
        ++f.object_pixels;
    }

    std::size_t box_area_sum = 0;
    for (Frame& f : boxes) {
        if (f.object_pixels < min_area) continue;
        f.box_area = (f.row_max - f.row_min + 1) * (f.col_max - f.col_min + 1);
        f.id = part.frames.size() + 1;
        box_area_sum += f.box_area;
        for (std::size_t r = f.row_min; r <= f.row_max; ++r)
            for (std::size_t c = f.col_min; c <= f.col_max; ++c)
                part.box_cover[r * w + c] = 1;
        part.frames.push_back(f);
    }

    std::size_t covered = 0;
    for (std::uint8_t v : part.box_cover) covered += v;
    part.background_area = labeling.extent.area() - covered;
    part.degenerate = part.frames.empty();

    switch (mode.kind) {
        case AlphaKind::separable:
            part.alpha = box_area_sum == 0
                             ? 0.0
                             : static_cast<double>(part.background_area) / static_cast<double>(box_area_sum);
            break;
        case AlphaKind::composite:
            part.alpha = 0.0;
            break;
        case AlphaKind::fixed:
            part.alpha = mode.value;
            break;
    }
    return part;
}

inline Partition build_partition(const BinaryMask& mask, AlphaMode mode = AlphaMode::separable(),
                                 Connectivity connectivity = Connectivity::eight,
                                 std::size_t min_area = 0) {
    return build_partition(label_components(mask, connectivity), mode, min_area);
}

// Pixel indices of one frame box, in raster order.
class FramePixelRange {
public:
    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = std::size_t;
        using difference_type = std::ptrdiff_t;
        using pointer = const std::size_t*;
        using reference = std::size_t;

        iterator() = default;
        iterator(std::size_t row, std::size_t col, const FramePixelRange* range)
            : row_(row), col_(col), range_(range) {}

        std::size_t operator*() const { return row_ * range_->width_ + col_; }
        iterator& operator++() {
            if (++col_ > range_->col_max_) {
                col_ = range_->col_min_;
                ++row_;
            }
            return *this;
        }
        iterator operator++(int) {
            iterator copy = *this;
            ++*this;
            return copy;
        }
        friend bool operator==(const iterator& a, const iterator& b) {
            return a.row_ == b.row_ && a.col_ == b.col_;
        }

    private:
        std::size_t row_ = 0;
        std::size_t col_ = 0;
        const FramePixelRange* range_ = nullptr;
    };

    FramePixelRange(const Frame& frame, const Extent& extent)
        : row_min_(frame.row_min),
          row_max_(frame.row_max),
          col_min_(frame.col_min),
          col_max_(frame.col_max),
          width_(extent.width) {
        if (frame.row_max >= extent.height || frame.col_max >= extent.width)
            throw std::invalid_argument("frame pixels: box exceeds image bounds");
    }

    iterator begin() const { return {row_min_, col_min_, this}; }
    iterator end() const { return {row_max_ + 1, col_min_, this}; }
    std::size_t size() const { return (row_max_ - row_min_ + 1) * (col_max_ - col_min_ + 1); }

private:
    std::size_t row_min_, row_max_, col_min_, col_max_, width_;
};

inline FramePixelRange frame_pixels(const Frame& frame, const Extent& extent) {
    return {frame, extent};
}

// Pixel indices outside every frame box, in raster order.
class BackgroundPixelRange {
public:
    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = std::size_t;
        using difference_type = std::ptrdiff_t;
        using pointer = const std::size_t*;
        using reference = std::size_t;

        iterator() = default;
        iterator(std::size_t index, const std::vector<std::uint8_t>* cover)
            : index_(index), cover_(cover) {
            advance_past_covered();
        }

        std::size_t operator*() const { return index_; }
        iterator& operator++() {
            ++index_;
            advance_past_covered();
            return *this;
        }
        iterator operator++(int) {
            iterator copy = *this;
            ++*this;
            return copy;
        }
        friend bool operator==(const iterator& a, const iterator& b) {
            return a.index_ == b.index_;
        }

    private:
        void advance_past_covered() {
            while (index_ < cover_->size() && (*cover_)[index_] != 0) ++index_;
        }

        std::size_t index_ = 0;
        const std::vector<std::uint8_t>* cover_ = nullptr;
    };

    explicit BackgroundPixelRange(const Partition& partition) : cover_(&partition.box_cover) {}

    iterator begin() const { return {0, cover_}; }
    iterator end() const { return {cover_->size(), cover_}; }

private:
    const std::vector<std::uint8_t>* cover_;
};

inline BackgroundPixelRange background_pixels(const Partition& partition) {
    return BackgroundPixelRange(partition);
}

inline auto all_pixels(const Extent& extent) {
    return std::views::iota(std::size_t{0}, extent.area());
}

}  // namespace sieval
