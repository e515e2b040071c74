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

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include <json.hpp>

#include "sieval/loss.hpp"
#include "sieval/partition.hpp"
#include "sieval/raster.hpp"

namespace sieval {

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, top to bottom
};

namespace detail {

[[noreturn]] inline void io_fail(const std::filesystem::path& path, const std::string& reason) {
    throw std::runtime_error(path.string() + ": " + reason);
}

class FileHandle {
public:
    FileHandle(const std::filesystem::path& path, const char* mode)
        : file_(std::fopen(path.c_str(), mode)) {
        if (!file_) io_fail(path, "cannot open file");
    }
    ~FileHandle() {
        if (file_) std::fclose(file_);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
    FILE* get() const { return file_; }

private:
    FILE* file_;
};

inline GrayImage read_png_gray(const std::filesystem::path& path) {
    FileHandle file(path, "rb");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) io_fail(path, "png reader allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        io_fail(path, "png info allocation failed");
    }

    GrayImage out;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        io_fail(path, "corrupt png stream");
    }

    png_init_io(png, file.get());
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    if (color_type != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        io_fail(path, "expected single-channel grayscale png");
    }
    if (bit_depth > 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        io_fail(path, "expected 8-bit png");
    }
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);

    out.width = width;
    out.height = height;
    out.pixels.resize(static_cast<std::size_t>(width) * height);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r)
        rows[r] = out.pixels.data() + static_cast<std::size_t>(r) * width;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

inline int pgm_next_token(std::istream& in, std::string& token) {
    token.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    return token.empty() ? EOF : 0;
}

inline std::size_t pgm_parse_number(std::istream& in, const std::filesystem::path& path,
                                    const char* what) {
    std::string token;
    if (pgm_next_token(in, token) == EOF) io_fail(path, std::string("truncated pgm header at ") + what);
    std::size_t value = 0;
    for (char c : token) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            io_fail(path, std::string("malformed pgm ") + what);
        value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    return value;
}

inline GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_fail(path, "cannot open file");

    char magic[2] = {0, 0};
    in.read(magic, 2);
    const bool binary = magic[0] == 'P' && magic[1] == '5';
    const bool ascii = magic[0] == 'P' && magic[1] == '2';
    if (!binary && !ascii) io_fail(path, "not a pgm file");

    GrayImage out;
    out.width = pgm_parse_number(in, path, "width");
    out.height = pgm_parse_number(in, path, "height");
    const std::size_t maxval = pgm_parse_number(in, path, "maxval");
    if (out.width == 0 || out.height == 0) io_fail(path, "zero-sized image");
    if (maxval == 0 || maxval > 255) io_fail(path, "expected 8-bit pgm");

    const std::size_t count = out.width * out.height;
    out.pixels.resize(count);
    if (binary) {
        // The maxval is followed by exactly one whitespace byte.
        in.read(reinterpret_cast<char*>(out.pixels.data()),
                static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count) io_fail(path, "truncated pgm payload");
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t v = pgm_parse_number(in, path, "pixel");
            if (v > maxval) io_fail(path, "pgm pixel exceeds maxval");
            out.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    return out;
}

inline GrayImage read_gray(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) io_fail(path, "cannot open file");
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    if (probe.gcount() != 2) io_fail(path, "file too short");
    probe.close();

    if (magic[0] == 0x89 && magic[1] == 'P') return read_png_gray(path);
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '2')) return read_pgm(path);
    io_fail(path, "unsupported image format (expected png or pgm)");
}

}  // namespace detail

inline BinaryMask load_ground_truth(const std::filesystem::path& path,
                                    std::uint8_t binarize_threshold = 128) {
    const GrayImage img = detail::read_gray(path);
    if (img.width == 0 || img.height == 0) detail::io_fail(path, "zero-sized image");
    return BinaryMask::from_bytes(img.width, img.height, img.pixels, binarize_threshold);
}

inline SaliencyMap load_prediction(const std::filesystem::path& path) {
    const GrayImage img = detail::read_gray(path);
    if (img.width == 0 || img.height == 0) detail::io_fail(path, "zero-sized image");
    return SaliencyMap::from_bytes(img.width, img.height, img.pixels);
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) detail::io_fail(path, "cannot open file for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) detail::io_fail(path, "short write");
}

// PFM, grayscale variant: "Pf\n<w> <h>\n-1.0\n" then rows bottom-to-top of
// little-endian 32-bit floats. The negative scale marks little-endian.
inline void write_pfm(const std::filesystem::path& path, const Raster& raster) {
    for (float v : raster.data())
        if (!std::isfinite(v)) detail::io_fail(path, "non-finite raster value");

    std::ofstream out(path, std::ios::binary);
    if (!out) detail::io_fail(path, "cannot open file for writing");
    out << "Pf\n" << raster.width() << " " << raster.height() << "\n-1.0\n";

    std::vector<char> payload;
    payload.reserve(raster.size() * 4);
    for (std::size_t r = raster.height(); r-- > 0;) {
        for (std::size_t c = 0; c < raster.width(); ++c) {
            const std::uint32_t bits = std::bit_cast<std::uint32_t>(raster.at(r, c));
            payload.push_back(static_cast<char>(bits & 0xff));
            payload.push_back(static_cast<char>((bits >> 8) & 0xff));
            payload.push_back(static_cast<char>((bits >> 16) & 0xff));
            payload.push_back(static_cast<char>((bits >> 24) & 0xff));
        }
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) detail::io_fail(path, "short write");
}

inline Raster read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::io_fail(path, "cannot open file");

    std::string magic;
    std::size_t width = 0, height = 0;
    double scale = 0.0;
    in >> magic >> width >> height >> scale;
    if (magic != "Pf") detail::io_fail(path, "not a grayscale pfm file");
    if (width == 0 || height == 0) detail::io_fail(path, "zero-sized image");
    if (scale == 0.0) detail::io_fail(path, "malformed pfm scale");
    in.get();  // single whitespace byte after the scale

    const bool little_endian = scale < 0.0;
    std::vector<char> payload(width * height * 4);
    in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size())
        detail::io_fail(path, "truncated pfm payload");

    Raster raster(width, height);
    std::size_t offset = 0;
    for (std::size_t r = height; r-- > 0;) {
        for (std::size_t c = 0; c < width; ++c) {
            const auto b0 = static_cast<std::uint32_t>(static_cast<std::uint8_t>(payload[offset]));
            const auto b1 = static_cast<std::uint32_t>(static_cast<std::uint8_t>(payload[offset + 1]));
            const auto b2 = static_cast<std::uint32_t>(static_cast<std::uint8_t>(payload[offset + 2]));
            const auto b3 = static_cast<std::uint32_t>(static_cast<std::uint8_t>(payload[offset + 3]));
            offset += 4;
            const std::uint32_t bits = little_endian
                                           ? (b0 | (b1 << 8) | (b2 << 16) | (b3 << 24))
                                           : (b3 | (b2 << 8) | (b1 << 16) | (b0 << 24));
            raster.at(r, c) = std::bit_cast<float>(bits);
        }
    }
    return raster;
}

inline nlohmann::ordered_json partition_manifest(const Partition& partition,
                                                 const std::string& image) {
    nlohmann::ordered_json manifest;
    manifest["image"] = image;
    manifest["width"] = partition.extent.width;
    manifest["height"] = partition.extent.height;
    manifest["k"] = partition.frames.size();
    manifest["alpha"] = partition.alpha;
    manifest["alpha_mode"] = partition.mode.name();
    manifest["frames"] = nlohmann::ordered_json::array();
    for (const Frame& f : partition.frames) {
        manifest["frames"].push_back({{"id", f.id},
                                      {"row_min", f.row_min},
                                      {"row_max", f.row_max},
                                      {"col_min", f.col_min},
                                      {"col_max", f.col_max},
                                      {"box_area", f.box_area},
                                      {"object_pixels", f.object_pixels}});
    }
    manifest["background_area"] = partition.background_area;
    return manifest;
}

inline void write_weight_map(const WeightMap& map, const std::filesystem::path& raster_path,
                             const std::filesystem::path& manifest_path,
                             const std::string& image = {}) {
    write_pfm(raster_path, map.to_raster());
    const std::string name = image.empty() ? raster_path.stem().string() : image;
    std::ofstream out(manifest_path);
    if (!out) detail::io_fail(manifest_path, "cannot open file for writing");
    out << partition_manifest(map.partition, name).dump(2) << "\n";
    if (!out) detail::io_fail(manifest_path, "short write");
}

}  // namespace sieval
