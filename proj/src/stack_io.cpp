#include "uscan/stack_io.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <png.h>

#include <nlohmann/json.hpp>

namespace uscan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slice_name(int index, bool labels) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "slice_%04d%s.png", index, labels ? "_labels" : "");
    return buf;
}

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png_gray(const Image8& img, const fs::path& file) {
    FilePtr fp(std::fopen(file.string().c_str(), "wb"));
    if (!fp) throw IoFailure("cannot open " + file.string() + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoFailure("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoFailure("libpng write failed for " + file.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height(); ++y)
        png_write_row(png, const_cast<png_bytep>(&img.at(0, y)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image8 read_png_gray(const fs::path& file) {
    FilePtr fp(std::fopen(file.string().c_str(), "rb"));
    if (!fp) throw IoFailure("cannot open " + file.string());

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw CorruptImage(file.string() + " is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoFailure("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptImage("libpng failed to decode " + file.string());
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // normalize anything we might get to 8-bit grayscale
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
        color == PNG_COLOR_TYPE_PALETTE)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_read_update_info(png, info);

    Image8 img(static_cast<int>(png_get_image_width(png, info)),
               static_cast<int>(png_get_image_height(png, info)));
    for (int y = 0; y < img.height(); ++y)
        png_read_row(png, &img.at(0, y), nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

std::string manifest_to_json(const ScanManifest& m) {
    json j;
    j["slice_count"] = m.slice_count;
    j["pixel_width"] = m.pixel_width;
    j["pixel_height"] = m.pixel_height;
    j["pixel_size_mm"] = m.pixel_size_mm;
    j["scan_length_mm"] = m.scan_length_mm;
    j["slice_spacing_mm"] = m.slice_spacing_mm;
    j["source_id"] = m.source_id;
    if (m.dynamic_range_db)
        j["dynamic_range_db"] = *m.dynamic_range_db;
    else
        j["dynamic_range_db"] = nullptr;
    return j.dump(2) + "\n";
}

ScanManifest manifest_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedManifest(std::string("manifest.json is not valid JSON: ") + e.what());
    }
    ScanManifest m;
    try {
        m.slice_count = j.at("slice_count").get<int>();
        m.pixel_width = j.at("pixel_width").get<int>();
        m.pixel_height = j.at("pixel_height").get<int>();
        m.pixel_size_mm = j.at("pixel_size_mm").get<double>();
        m.scan_length_mm = j.at("scan_length_mm").get<double>();
        m.slice_spacing_mm = j.at("slice_spacing_mm").get<double>();
        m.source_id = j.at("source_id").get<std::string>();
        if (j.contains("dynamic_range_db") && !j["dynamic_range_db"].is_null())
            m.dynamic_range_db = j["dynamic_range_db"].get<double>();
    } catch (const json::exception& e) {
        throw MalformedManifest(std::string("manifest.json missing or bad field: ") + e.what());
    }
    m.validate();
    return m;
}

namespace {

void write_volume(const ScanManifest& manifest, const std::vector<Image8>& slices,
                  const fs::path& dir, bool labels) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create directory " + dir.string());

    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    if (!mf) throw IoFailure("cannot write manifest.json in " + dir.string());
    mf << manifest_to_json(manifest);
    mf.close();

    for (int i = 0; i < static_cast<int>(slices.size()); ++i)
        write_png_gray(slices[i], dir / slice_name(i, labels));
}

std::pair<ScanManifest, std::vector<Image8>> read_volume(const fs::path& dir, bool labels) {
    const fs::path mpath = dir / "manifest.json";
    std::ifstream mf(mpath, std::ios::binary);
    if (!mf) throw MalformedManifest("missing manifest.json in " + dir.string());
    std::ostringstream ss;
    ss << mf.rdbuf();
    const ScanManifest manifest = manifest_from_json(ss.str());

    std::vector<Image8> slices;
    slices.reserve(manifest.slice_count);
    for (int i = 0; i < manifest.slice_count; ++i) {
        const fs::path p = dir / slice_name(i, labels);
        if (!fs::exists(p))
            throw SliceCountMismatch("manifest says " + std::to_string(manifest.slice_count) +
                                     " slices but " + p.filename().string() + " is missing");
        slices.push_back(read_png_gray(p));
    }
    return {manifest, std::move(slices)};
}

}  // namespace

void write_stack(const ImageStack& stack, const fs::path& dir) {
    stack.validate();
    write_volume(stack.manifest, stack.slices, dir, false);
}

ImageStack read_stack(const fs::path& dir) {
    auto [manifest, slices] = read_volume(dir, false);
    ImageStack stack{manifest, std::move(slices)};
    stack.validate();
    return stack;
}

void write_labels(const LabelVolume& vol, const fs::path& dir) {
    vol.validate();
    write_volume(vol.manifest, vol.labels, dir, true);
}

LabelVolume read_labels(const fs::path& dir) {
    auto [manifest, slices] = read_volume(dir, true);
    LabelVolume vol{manifest, std::move(slices)};
    vol.validate();
    return vol;
}

}  // namespace uscan
