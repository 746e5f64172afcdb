#pragma once

// PNG / JPEG raster I/O (8-bit, 1 or 3 channels). PNG uses libpng's
// simplified API; JPEG uses the classic libjpeg API with setjmp unwinding,
// so no C++ objects with destructors may live between setjmp and the
// library calls.

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "dsstile/errors.hpp"
#include "dsstile/raster.hpp"

namespace dss {

inline Raster read_png(const std::string& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw LoadError("read_png: " + path + ": " + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    Raster out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.channels = 3;
    out.data.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw LoadError("read_png: " + path + ": " + msg);
    }
    return out;
}

inline void write_png(const std::string& path, const Raster& img) {
    if (!img.valid() || (img.channels != 1 && img.channels != 3)) {
        throw DomainError("write_png: raster must be valid with 1 or 3 channels");
    }
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.data.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw LoadError("write_png: " + path + ": " + msg);
    }
}

namespace detail {

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

struct FileCloser {
    std::FILE* f = nullptr;
    ~FileCloser() {
        if (f) std::fclose(f);
    }
};

} // namespace detail

inline Raster read_jpeg(const std::string& path) {
    detail::FileCloser fc;
    fc.f = std::fopen(path.c_str(), "rb");
    if (!fc.f) throw LoadError("read_jpeg: cannot open " + path);

    jpeg_decompress_struct cinfo;
    detail::JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = detail::jpeg_error_exit;

    Raster out; // declared before setjmp; only plain fields mutated after
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw LoadError("read_jpeg: " + path + ": " + jerr.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fc.f);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    out.width = static_cast<int>(cinfo.output_width);
    out.height = static_cast<int>(cinfo.output_height);
    out.channels = 3;
    out.data.resize(static_cast<std::size_t>(out.width) * out.height * 3);
    const std::size_t row_bytes = static_cast<std::size_t>(out.width) * 3;
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.data.data() + cinfo.output_scanline * row_bytes;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

inline void write_jpeg(const std::string& path, const Raster& img, int quality = 92) {
    if (!img.valid() || (img.channels != 1 && img.channels != 3)) {
        throw DomainError("write_jpeg: raster must be valid with 1 or 3 channels");
    }
    detail::FileCloser fc;
    fc.f = std::fopen(path.c_str(), "wb");
    if (!fc.f) throw LoadError("write_jpeg: cannot open " + path + " for writing");

    jpeg_compress_struct cinfo;
    detail::JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = detail::jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_compress(&cinfo);
        throw LoadError("write_jpeg: " + path + ": " + jerr.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, fc.f);
    cinfo.image_width = static_cast<JDIMENSION>(img.width);
    cinfo.image_height = static_cast<JDIMENSION>(img.height);
    cinfo.input_components = img.channels;
    cinfo.in_color_space = img.channels == 3 ? JCS_RGB : JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    const std::size_t row_bytes = static_cast<std::size_t>(img.width) * img.channels;
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(img.data.data() + cinfo.next_scanline * row_bytes);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
}

inline bool has_suffix_icase(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(), [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
    });
}

inline Raster read_image(const std::string& path) {
    if (has_suffix_icase(path, ".png")) return read_png(path);
    if (has_suffix_icase(path, ".jpg") || has_suffix_icase(path, ".jpeg")) return read_jpeg(path);
    throw LoadError("read_image: unsupported extension on " + path + " (png/jpg/jpeg)");
}

inline void write_image(const std::string& path, const Raster& img) {
    if (has_suffix_icase(path, ".png")) return write_png(path, img);
    if (has_suffix_icase(path, ".jpg") || has_suffix_icase(path, ".jpeg")) return write_jpeg(path, img);
    throw LoadError("write_image: unsupported extension on " + path + " (png/jpg/jpeg)");
}

} // namespace dss
