#pragma once

// Mask decoding and encoding: PNG and PGM grayscale images, plus a plain
// text grid ("height width" header, then one row of labels per line).
// Pixel values are instance ids, read verbatim.

#include <png.h>

#include <algorithm>
#include <charconv>
#include <csetjmp>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rmis/error.hpp"
#include "rmis/mask.hpp"

namespace rmis {

enum class MaskFormat { GrayscaleImage, PlainGridText };

namespace detail {

inline constexpr unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G',
                                                   '\r', '\n', 0x1A, '\n'};

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

/// Minimal tokenizer over a byte buffer that understands '#' comments (PGM).
class Tokenizer {
 public:
  explicit Tokenizer(std::span<const unsigned char> data, bool comments)
      : data_(data), comments_(comments) {}

  bool next(std::string_view& token) {
    skip();
    if (pos_ >= data_.size()) return false;
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !is_space(data_[pos_])) ++pos_;
    token = {reinterpret_cast<const char*>(data_.data()) + start, pos_ - start};
    return true;
  }

  long long next_int(const char* what) {
    std::string_view tok;
    if (!next(tok)) throw DecodeError(std::string("unexpected end of data reading ") + what);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw DecodeError(std::string("malformed ") + what + ": '" +
                        std::string(tok) + "'");
    }
    return value;
  }

  std::size_t position() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip() {
    while (pos_ < data_.size()) {
      if (is_space(data_[pos_])) {
        ++pos_;
      } else if (comments_ && data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const unsigned char> data_;
  bool comments_;
  std::size_t pos_ = 0;
};

inline Label checked_label(long long v) {
  if (v < 0) throw DecodeError("negative label value " + std::to_string(v));
  if (v > 0xFFFF) {
    throw FormatError("label value " + std::to_string(v) +
                      " does not fit in 16 bits");
  }
  return static_cast<Label>(v);
}

inline void checked_dims(long long width, long long height) {
  if (width <= 0 || height <= 0 || width > std::numeric_limits<int>::max() ||
      height > std::numeric_limits<int>::max() ||
      width * height > (1LL << 31)) {
    throw DecodeError("invalid mask dimensions " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
}

inline LabelMask decode_grid_text(std::span<const unsigned char> data) {
  Tokenizer tok(data, false);
  const long long height = tok.next_int("grid height");
  const long long width = tok.next_int("grid width");
  checked_dims(width, height);
  std::vector<Label> labels;
  labels.reserve(static_cast<std::size_t>(width * height));
  for (long long i = 0; i < width * height; ++i) {
    labels.push_back(checked_label(tok.next_int("grid value")));
  }
  std::string_view extra;
  if (tok.next(extra)) throw DecodeError("trailing data after label grid");
  return {static_cast<int>(width), static_cast<int>(height), std::move(labels)};
}

inline LabelMask decode_pgm(std::span<const unsigned char> data) {
  if (data.size() < 2 || data[0] != 'P') throw DecodeError("not a PNM stream");
  const char kind = static_cast<char>(data[1]);
  if (kind == '3' || kind == '6') {
    throw FormatError("multi-channel PPM image; expected single-channel");
  }
  if (kind != '2' && kind != '5') {
    throw DecodeError(std::string("unsupported PNM variant P") + kind);
  }
  Tokenizer tok(data.subspan(2), true);
  const long long width = tok.next_int("PGM width");
  const long long height = tok.next_int("PGM height");
  const long long maxval = tok.next_int("PGM maxval");
  checked_dims(width, height);
  if (maxval <= 0) throw DecodeError("invalid PGM maxval");
  if (maxval > 0xFFFF) throw FormatError("PGM maxval exceeds 16 bits");

  const auto count = static_cast<std::size_t>(width * height);
  std::vector<Label> labels;
  labels.reserve(count);
  if (kind == '2') {
    for (std::size_t i = 0; i < count; ++i) {
      labels.push_back(checked_label(tok.next_int("PGM value")));
    }
    return {static_cast<int>(width), static_cast<int>(height), std::move(labels)};
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t pos = 2 + tok.position() + 1;
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  if (data.size() < pos + count * bytes_per) throw DecodeError("truncated PGM raster");
  for (std::size_t i = 0; i < count; ++i) {
    if (bytes_per == 1) {
      labels.push_back(data[pos++]);
    } else {
      labels.push_back(static_cast<Label>((data[pos] << 8) | data[pos + 1]));
      pos += 2;
    }
  }
  return {static_cast<int>(width), static_cast<int>(height), std::move(labels)};
}

struct PngErrorState {
  char message[256] = "PNG decode failure";
};

extern "C" inline void png_error_handler(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "PNG error: %s", msg);
  png_longjmp(png, 1);
}

extern "C" inline void png_warning_handler(png_structp, png_const_charp) {}

struct PngMemoryReader {
  const unsigned char* data;
  std::size_t size;
  std::size_t pos;
};

extern "C" inline void png_read_memory(png_structp png, png_bytep out,
                                       png_size_t n) {
  auto* src = static_cast<PngMemoryReader*>(png_get_io_ptr(png));
  if (src->pos + n > src->size) png_error(png, "truncated stream");
  std::memcpy(out, src->data + src->pos, n);
  src->pos += n;
}

extern "C" inline void png_write_memory(png_structp png, png_bytep in,
                                        png_size_t n) {
  auto* dst = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
  dst->insert(dst->end(), in, in + n);
}

extern "C" inline void png_flush_noop(png_structp) {}

inline LabelMask decode_png(std::span<const unsigned char> data) {
  PngErrorState err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                           png_error_handler, png_warning_handler);
  if (png == nullptr) throw DecodeError("cannot allocate PNG reader");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (info == nullptr) throw DecodeError("cannot allocate PNG info");

  PngMemoryReader src{data.data(), data.size(), 0};
  std::vector<unsigned char> raw;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) throw DecodeError(err.message);

  png_set_read_fn(png, &src, png_read_memory);
  png_read_info(png, info);
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int depth = 0;
  int color = 0;
  int interlace = 0;
  png_get_IHDR(png, info, &width, &height, &depth, &color, &interlace, nullptr,
               nullptr);
  if (color != PNG_COLOR_TYPE_GRAY) {
    throw FormatError("PNG is not single-channel grayscale (color type " +
                      std::to_string(color) + ")");
  }
  checked_dims(width, height);
  if (depth < 8) png_set_packing(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  raw.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = raw.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);

  std::vector<Label> labels(static_cast<std::size_t>(width) * height);
  for (png_uint_32 r = 0; r < height; ++r) {
    const unsigned char* row = rows[r];
    for (png_uint_32 c = 0; c < width; ++c) {
      labels[static_cast<std::size_t>(r) * width + c] =
          depth == 16 ? static_cast<Label>((row[2 * c] << 8) | row[2 * c + 1])
                      : static_cast<Label>(row[c]);
    }
  }
  return {static_cast<int>(width), static_cast<int>(height), std::move(labels)};
}

}  // namespace detail

/// Decodes a mask. Grayscale images may be PNG or PGM (P2/P5); the flavour is
/// sniffed from the leading bytes.
inline LabelMask load_mask(std::span<const unsigned char> source, MaskFormat format) {
  if (format == MaskFormat::PlainGridText) return detail::decode_grid_text(source);
  if (source.size() >= 8 &&
      std::equal(source.begin(), source.begin() + 8, detail::kPngSignature)) {
    return detail::decode_png(source);
  }
  if (source.size() >= 2 && source[0] == 'P') return detail::decode_pgm(source);
  throw DecodeError("unrecognised image stream (expected PNG or PGM)");
}

inline LabelMask load_mask(std::string_view source, MaskFormat format) {
  return load_mask(
      std::span(reinterpret_cast<const unsigned char*>(source.data()), source.size()),
      format);
}

inline std::string encode_grid_text(const LabelMask& mask) {
  std::string out = std::to_string(mask.height()) + " " + std::to_string(mask.width()) + "\n";
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (c != 0) out += ' ';
      out += std::to_string(mask.at(r, c));
    }
    out += '\n';
  }
  return out;
}

inline std::vector<unsigned char> encode_pgm(const LabelMask& mask) {
  const Label maxv = mask.empty() ? 0 : *std::max_element(mask.labels().begin(), mask.labels().end());
  const bool wide = maxv > 255;
  const std::string header = "P5\n" + std::to_string(mask.width()) + " " +
                             std::to_string(mask.height()) + "\n" +
                             (wide ? "65535" : "255") + "\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  out.reserve(out.size() + mask.size() * (wide ? 2 : 1));
  for (Label v : mask.labels()) {
    if (wide) out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v & 0xFF));
  }
  return out;
}

/// 8-bit grayscale when every label fits in a byte, 16-bit otherwise.
inline std::vector<unsigned char> encode_png(const LabelMask& mask,
                                             int compression_level = 6) {
  detail::PngErrorState err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                            detail::png_error_handler,
                                            detail::png_warning_handler);
  if (png == nullptr) throw Error("cannot allocate PNG writer");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (info == nullptr) throw Error("cannot allocate PNG info");
  if (mask.empty()) throw ShapeError("cannot encode an empty mask");

  const Label maxv = *std::max_element(mask.labels().begin(), mask.labels().end());
  const int depth = maxv > 255 ? 16 : 8;
  const std::size_t rowbytes = static_cast<std::size_t>(mask.width()) * (depth / 8);
  std::vector<unsigned char> out;
  std::vector<unsigned char> raw(rowbytes * mask.height());
  std::vector<png_bytep> rows(mask.height());
  for (int r = 0; r < mask.height(); ++r) {
    rows[r] = raw.data() + r * rowbytes;
    for (int c = 0; c < mask.width(); ++c) {
      const Label v = mask.at(r, c);
      if (depth == 16) {
        rows[r][2 * c] = static_cast<unsigned char>(v >> 8);
        rows[r][2 * c + 1] = static_cast<unsigned char>(v & 0xFF);
      } else {
        rows[r][c] = static_cast<unsigned char>(v);
      }
    }
  }

  volatile int header_depth = depth;
  if (setjmp(png_jmpbuf(png))) throw Error(err.message);

  png_set_write_fn(png, &out, detail::png_write_memory, detail::png_flush_noop);
  png_set_compression_level(png, compression_level);
  png_set_IHDR(png, info, static_cast<png_uint_32>(mask.width()),
               static_cast<png_uint_32>(mask.height()), header_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  return out;
}

inline std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline MaskFormat format_for_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".txt" || ext == ".grid") return MaskFormat::PlainGridText;
  return MaskFormat::GrayscaleImage;
}

inline LabelMask load_mask_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return load_mask(std::span<const unsigned char>(bytes), format_for_path(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

/// Writes by extension: .png, .pgm, or text grid for .txt/.grid.
inline void save_mask_file(const LabelMask& mask, const std::filesystem::path& path,
                           int png_compression_level = 6) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::string ext = path.extension().string();
  if (ext == ".png") {
    const auto bytes = encode_png(mask, png_compression_level);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  } else if (ext == ".pgm") {
    const auto bytes = encode_pgm(mask);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  } else {
    out << encode_grid_text(mask);
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace rmis
