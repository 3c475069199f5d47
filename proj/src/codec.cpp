#include "seamforge/codec.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <string>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>

// jpeglib.h needs size_t/FILE declared first.
#include <jpeglib.h>

namespace seamforge {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

struct PngReadCursor {
  std::span<const std::uint8_t> data;
  std::size_t offset = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t length) {
  auto* cur = static_cast<PngReadCursor*>(png_get_io_ptr(png));
  if (cur->offset + length > cur->data.size()) png_error(png, "truncated PNG stream");
  std::memcpy(out, cur->data.data() + cur->offset, length);
  cur->offset += length;
}

void png_write_to_vector(png_structp png, png_bytep in, png_size_t length) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + length);
}

void png_flush_noop(png_structp) {}

void png_warning_silent(png_structp, png_const_charp) {}

thread_local std::string png_last_error;

[[noreturn]] void png_error_to_jump(png_structp png, png_const_charp msg) {
  png_last_error = msg ? msg : "unknown error";
  png_longjmp(png, 1);
}

std::uint16_t quantize(double v, double max_code) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * max_code));
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_to_jump, png_warning_silent);
  if (!png) throw RasterError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw RasterError("png: out of memory");
  }

  PngReadCursor cursor{bytes, 0};
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;
  std::string error;
  int channels = 0;
  int depth = 0;
  png_uint_32 width = 0;
  png_uint_32 height = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw RasterError("png: " + png_last_error);
  }
  png_set_read_fn(png, &cursor, png_read_from_span);
  png_read_info(png, info);

  int color_type = png_get_color_type(png, info);
  depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) error = "png: transparency is not supported";
  if (color_type & PNG_COLOR_MASK_ALPHA) error = "png: alpha channel is not supported";
  if (depth == 16) png_set_swap(png);  // host order, assumes little-endian hosts
  png_read_update_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  depth = png_get_bit_depth(png, info);
  if (error.empty() && channels != 1 && channels != 3)
    error = "png: unsupported channel count " + std::to_string(channels);
  if (!error.empty()) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw RasterError(error);
  }

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = buffer.data() + r * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  RasterImage img(height, width, channels, depth);
  const double max_code = img.max_code();
  for (png_uint_32 r = 0; r < height; ++r) {
    for (png_uint_32 c = 0; c < width; ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        const std::size_t k = static_cast<std::size_t>(c) * channels + ch;
        double code;
        if (depth == 16) {
          std::uint16_t v;
          std::memcpy(&v, rows[r] + 2 * k, 2);
          code = v;
        } else {
          code = rows[r][k];
        }
        img(r, c, ch) = code / max_code;
      }
    }
  }
  return img;
}

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_output_silent(j_common_ptr) {}

RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager jerr{};
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  jerr.pub.output_message = jpeg_output_silent;
  std::vector<std::uint8_t> buffer;

  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw RasterError(std::string("jpeg: ") + jerr.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.num_components != 1 && cinfo.num_components != 3) {
    jpeg_destroy_decompress(&cinfo);
    throw RasterError("jpeg: unsupported channel count");
  }
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int channels = cinfo.output_components;
  const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * channels;
  buffer.resize(stride * cinfo.output_height);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = buffer.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  const Index height = cinfo.output_height;
  const Index width = cinfo.output_width;
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);

  RasterImage img(height, width, channels, 8);
  for (Index r = 0; r < height; ++r)
    for (Index c = 0; c < width; ++c)
      for (int ch = 0; ch < channels; ++ch)
        img(r, c, ch) = buffer[static_cast<std::size_t>(r) * stride + c * channels + ch] / 255.0;
  return img;
}

Bytes write_png(Index height, Index width, int channels, int depth,
                const std::vector<std::uint8_t>& buffer) {
  Bytes out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_to_jump, png_warning_silent);
  if (!png) throw RasterError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw RasterError("png: out of memory");
  }
  const std::size_t row_bytes = static_cast<std::size_t>(width) * channels * (depth / 8);
  std::vector<png_const_bytep> rows(static_cast<std::size_t>(height));
  for (Index r = 0; r < height; ++r) rows[r] = buffer.data() + r * row_bytes;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw RasterError("png: encode failure");
  }
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (depth == 16) png_set_swap(png);
  png_write_rows(png, const_cast<png_bytepp>(rows.data()), static_cast<png_uint_32>(height));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

Container sniff_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) return Container::png;
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF)
    return Container::jpeg;
  return Container::unknown;
}

RasterImage decode_image(std::span<const std::uint8_t> bytes, DecodeOptions opts) {
  switch (sniff_container(bytes)) {
    case Container::png:
      return decode_png(bytes);
    case Container::jpeg:
      if (!opts.allow_lossy) throw RasterError("lossy container (JPEG) not allowed here");
      return decode_jpeg(bytes);
    case Container::unknown:
      break;
  }
  throw RasterError("unsupported image container");
}

Bytes encode_png(const RasterImage& img) {
  const int depth = img.bit_depth();
  const int channels = img.channels();
  const double max_code = img.max_code();
  const int bytes_per_sample = depth / 8;
  std::vector<std::uint8_t> buffer(static_cast<std::size_t>(img.height() * img.width()) * channels *
                                   bytes_per_sample);
  std::size_t k = 0;
  for (Index r = 0; r < img.height(); ++r) {
    for (Index c = 0; c < img.width(); ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        const std::uint16_t code = quantize(img(r, c, ch), max_code);
        if (depth == 16) {
          std::memcpy(buffer.data() + k, &code, 2);
          k += 2;
        } else {
          buffer[k++] = static_cast<std::uint8_t>(code);
        }
      }
    }
  }
  return write_png(img.height(), img.width(), channels, depth, buffer);
}

Bytes encode_jpeg(const RasterImage& img, int quality) {
  if (quality < 1 || quality > 100) throw RasterError("jpeg quality must be in [1,100]");
  const int channels = img.channels();
  const std::size_t stride = static_cast<std::size_t>(img.width()) * channels;
  std::vector<std::uint8_t> buffer(stride * img.height());
  for (Index r = 0; r < img.height(); ++r)
    for (Index c = 0; c < img.width(); ++c)
      for (int ch = 0; ch < channels; ++ch)
        buffer[r * stride + c * channels + ch] = static_cast<std::uint8_t>(quantize(img(r, c, ch), 255.0));

  jpeg_compress_struct cinfo{};
  JpegErrorManager jerr{};
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  jerr.pub.output_message = jpeg_output_silent;
  unsigned char* mem = nullptr;
  unsigned long mem_size = 0;

  if (setjmp(jerr.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(mem);
    throw RasterError(std::string("jpeg: ") + jerr.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &mem, &mem_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = channels;
  cinfo.in_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = buffer.data() + cinfo.next_scanline * stride;
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  Bytes out(mem, mem + mem_size);
  std::free(mem);
  return out;
}

Bytes encode_seam_mask(const SeamMask& mask) {
  if (mask.inserted.rows() != mask.height() || mask.inserted.cols() != mask.width())
    throw RasterError("seam mask layers differ in shape");
  std::vector<std::uint8_t> buffer(static_cast<std::size_t>(mask.height() * mask.width()) * 3, 0);
  std::size_t k = 0;
  for (Index r = 0; r < mask.height(); ++r) {
    for (Index c = 0; c < mask.width(); ++c, k += 3) {
      buffer[k] = mask.removed(r, c) ? 255 : 0;
      buffer[k + 1] = mask.inserted(r, c) ? 255 : 0;
    }
  }
  return write_png(mask.height(), mask.width(), 3, 8, buffer);
}

SeamMask decode_seam_mask(std::span<const std::uint8_t> bytes) {
  const RasterImage img = decode_image(bytes);
  if (img.channels() != 3 || img.bit_depth() != 8)
    throw RasterError("seam mask must be an 8-bit RGB image");
  SeamMask mask(img.height(), img.width());
  for (Index r = 0; r < img.height(); ++r) {
    for (Index c = 0; c < img.width(); ++c) {
      const double red = img(r, c, 0);
      const double green = img(r, c, 1);
      const double blue = img(r, c, 2);
      const bool red_ok = red == 0.0 || red == 1.0;
      const bool green_ok = green == 0.0 || green == 1.0;
      if (!red_ok || !green_ok || blue != 0.0)
        throw RasterError("seam mask pixel outside the red/green/yellow/black palette");
      mask.removed(r, c) = red == 1.0;
      mask.inserted(r, c) = green == 1.0;
    }
  }
  return mask;
}

PixelMask decode_pixel_mask(std::span<const std::uint8_t> bytes, MaskKind kind) {
  const RasterImage img = decode_image(bytes);
  PixelMask mask{kind, BitPlane::Zero(img.height(), img.width())};
  for (int ch = 0; ch < img.channels(); ++ch)
    mask.bits = (mask.bits != 0 || img.plane(ch) > 0.0).cast<std::uint8_t>();
  return mask;
}

Bytes encode_pixel_mask(const PixelMask& mask) {
  RasterImage img(mask.height(), mask.width(), 1, 8);
  img.plane(0) = mask.bits.cast<double>();
  return encode_png(img);
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace seamforge
