#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "istdforge/image.hpp"

namespace istdforge {

namespace detail {

inline int pgm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    // skip whitespace and '#' comment lines
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
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok.empty() ? EOF : 0;
}

inline Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::string tok;
    if (pgm_next_token(in, tok) == EOF || tok != "P5")
        throw format_error(path + ": not a binary PGM (P5) file");
    long w = 0, h = 0, maxval = 0;
    try {
        if (pgm_next_token(in, tok) == EOF) throw format_error("");
        w = std::stol(tok);
        if (pgm_next_token(in, tok) == EOF) throw format_error("");
        h = std::stol(tok);
        if (pgm_next_token(in, tok) == EOF) throw format_error("");
        maxval = std::stol(tok);
    } catch (const std::exception&) {
        throw format_error(path + ": malformed PGM header");
    }
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw format_error(path + ": PGM header out of range");

    const bool wide = maxval > 255;
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    std::vector<unsigned char> raw(n * (wide ? 2 : 1));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw format_error(path + ": truncated PGM pixel data");

    Grid g(static_cast<int>(w), static_cast<int>(h));
    const double scale = 1.0 / static_cast<double>(maxval);
    double* out = g.data();
    if (wide) {
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            out[i] = v * scale;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) out[i] = raw[i] * scale;
    }
    return Image::from_grid(std::move(g));
}

inline void save_pgm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    std::vector<unsigned char> raw(img.size());
    const double* src = img.grid().data();
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = static_cast<unsigned char>(std::lround(src[i] * 255.0));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw io_error("short write to " + path);
}

inline Image load_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw io_error("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw io_error("libpng initialization failed");
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw format_error(path + ": libpng failed to decode");
    }

    png_init_io(png, fp);
    png_read_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);

    if (color != PNG_COLOR_TYPE_GRAY || (depth != 8 && depth != 16)) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw format_error(path + ": only 8/16-bit grayscale PNG is supported");
    }

    png_bytepp rows = png_get_rows(png, info);
    Grid g(static_cast<int>(w), static_cast<int>(h));
    if (depth == 8) {
        for (png_uint_32 y = 0; y < h; ++y)
            for (png_uint_32 x = 0; x < w; ++x)
                g(static_cast<int>(x), static_cast<int>(y)) = rows[y][x] / 255.0;
    } else {
        // 16-bit PNG samples are big-endian in the file.
        for (png_uint_32 y = 0; y < h; ++y)
            for (png_uint_32 x = 0; x < w; ++x) {
                const unsigned v = (static_cast<unsigned>(rows[y][2 * x]) << 8) | rows[y][2 * x + 1];
                g(static_cast<int>(x), static_cast<int>(y)) = v / 65535.0;
            }
    }

    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return Image::from_grid(std::move(g));
}

inline void save_png(const Image& img, const std::string& path) {
    std::vector<unsigned char> raw(img.size());
    const double* src = img.grid().data();
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = static_cast<unsigned char>(std::lround(src[i] * 255.0));
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
    for (int y = 0; y < img.height(); ++y)
        rows[static_cast<std::size_t>(y)] = raw.data() + static_cast<std::size_t>(y) * img.width();

    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw io_error("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw io_error("libpng initialization failed");
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw io_error(path + ": libpng failed to encode");
    }

    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);

    png_destroy_write_struct(&png, &info);
    if (std::fclose(fp) != 0) throw io_error("short write to " + path);
}

} // namespace detail

/// Loads an 8/16-bit grayscale PNG or binary PGM, scaling pixel values to
/// [0, 1] by the format's maximum sample value. Dispatches on magic bytes.
inline Image load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw io_error("cannot open " + path);
    unsigned char magic[8] = {};
    probe.read(reinterpret_cast<char*>(magic), 8);
    probe.close();
    if (magic[0] == 'P' && magic[1] == '5') return detail::load_pgm(path);
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (std::equal(png_sig, png_sig + 8, magic)) return detail::load_png(path);
    throw format_error(path + ": not a PNG or PGM file");
}

/// Writes an 8-bit grayscale file; the format follows the extension
/// (".png" or ".pgm"). Round-tripping changes no pixel by more than 1/255.
inline void save_image(const Image& img, const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".png") return detail::save_png(img, path);
    if (ext == ".pgm") return detail::save_pgm(img, path);
    throw format_error(path + ": unsupported output extension (use .png or .pgm)");
}

/// Masks travel as images: 0 stays 0, anything above 0.5 is a target pixel.
inline Mask load_mask(const std::string& path) {
    const Image img = load_image(path);
    Mask m(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            m.set(x, y, img(x, y) > 0.5);
    return m;
}

inline void save_mask(const Mask& m, const std::string& path) {
    Grid g(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            g(x, y) = m(x, y) ? 1.0 : 0.0;
    save_image(Image::from_grid(std::move(g)), path);
}

} // namespace istdforge
