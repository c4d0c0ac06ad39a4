#include <gtest/gtest.h>
#include <png.h>

#include <random>
#include <string>

#include "rmis/mask_io.hpp"
#include "support.hpp"

using rmis::LabelMask;
using rmis::MaskFormat;

namespace {

std::vector<unsigned char> rgb_png(int w, int h) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> pixels(static_cast<std::size_t>(w) * h * 3, 7);
  png_alloc_size_t size = 0;
  png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr);
  std::vector<unsigned char> out(size);
  png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr);
  out.resize(size);
  return out;
}

}  // namespace

TEST(GridText, AllZeroGrid) {
  const auto m = rmis::load_mask("4 4\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n", MaskFormat::PlainGridText);
  EXPECT_EQ(m.width(), 4);
  EXPECT_EQ(m.height(), 4);
  EXPECT_EQ(m.foreground_count(), 0u);
}

TEST(GridText, ValuesAreReadVerbatim) {
  const auto m = rmis::load_mask("2 3\n0 1 2\n2 0 1\n", MaskFormat::PlainGridText);
  EXPECT_EQ(m.width(), 3);
  EXPECT_EQ(m.height(), 2);
  EXPECT_EQ(m.at(0, 2), 2);
  EXPECT_EQ(rmis::instances(m).size(), 2u);
}

TEST(GridText, MalformedInputIsADecodeError) {
  EXPECT_THROW(rmis::load_mask("2 2\n0 1 1\n", MaskFormat::PlainGridText), rmis::DecodeError);
  EXPECT_THROW(rmis::load_mask("2 2\n0 1 x 1\n", MaskFormat::PlainGridText), rmis::DecodeError);
  EXPECT_THROW(rmis::load_mask("2 2\n0 1 1 1 5\n", MaskFormat::PlainGridText), rmis::DecodeError);
  EXPECT_THROW(rmis::load_mask("2 2\n0 -1 1 1\n", MaskFormat::PlainGridText), rmis::DecodeError);
  EXPECT_THROW(rmis::load_mask("0 2\n", MaskFormat::PlainGridText), rmis::Error);
  EXPECT_THROW(rmis::load_mask("", MaskFormat::PlainGridText), rmis::DecodeError);
}

TEST(GridText, LabelsMustFitSixteenBits) {
  EXPECT_THROW(rmis::load_mask("1 1\n65536\n", MaskFormat::PlainGridText), rmis::FormatError);
  EXPECT_EQ(rmis::load_mask("1 1\n65535\n", MaskFormat::PlainGridText).at(0, 0), 65535);
}

TEST(GridText, RoundTrip) {
  std::mt19937 rng(3);
  const auto m = testutil::random_mask(rng, 13, 9, 4);
  EXPECT_EQ(rmis::load_mask(rmis::encode_grid_text(m), MaskFormat::PlainGridText), m);
}

TEST(Png, RoundTripEightBit) {
  std::mt19937 rng(4);
  const auto m = testutil::random_mask(rng, 31, 17, 4);
  const auto bytes = rmis::encode_png(m);
  EXPECT_EQ(rmis::load_mask(bytes, MaskFormat::GrayscaleImage), m);
}

TEST(Png, RoundTripSixteenBit) {
  LabelMask m(3, 2, {0, 300, 65535, 1, 0, 256});
  EXPECT_EQ(rmis::load_mask(rmis::encode_png(m), MaskFormat::GrayscaleImage), m);
}

TEST(Png, ChallengeResolutionFrame) {
  auto m = LabelMask::zeros(960, 540);
  for (int r = 100; r < 300; ++r)
    for (int c = 200; c < 500; ++c) m.at(r, c) = 1;
  const auto back = rmis::load_mask(rmis::encode_png(m, 1), MaskFormat::GrayscaleImage);
  EXPECT_EQ(back.width(), 960);
  EXPECT_EQ(back.height(), 540);
  EXPECT_EQ(back, m);
}

TEST(Png, MultiChannelIsAFormatError) {
  EXPECT_THROW(rmis::load_mask(rgb_png(4, 3), MaskFormat::GrayscaleImage), rmis::FormatError);
}

TEST(Png, TruncatedStreamIsADecodeError) {
  auto bytes = rmis::encode_png(LabelMask(2, 2, {0, 1, 2, 3}));
  bytes.resize(bytes.size() / 2);
  EXPECT_THROW(rmis::load_mask(bytes, MaskFormat::GrayscaleImage), rmis::DecodeError);
}

TEST(Png, GarbageIsADecodeError) {
  EXPECT_THROW(rmis::load_mask("not an image", MaskFormat::GrayscaleImage), rmis::DecodeError);
}

TEST(Pgm, BinaryAndPlainVariants) {
  LabelMask m(3, 2, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(rmis::load_mask(rmis::encode_pgm(m), MaskFormat::GrayscaleImage), m);
  EXPECT_EQ(rmis::load_mask("P2\n# comment\n3 2\n255\n0 1 2\n3 4 5\n", MaskFormat::GrayscaleImage), m);
  LabelMask wide(2, 1, {1000, 2});
  EXPECT_EQ(rmis::load_mask(rmis::encode_pgm(wide), MaskFormat::GrayscaleImage), wide);
}

TEST(Pgm, ColourVariantsAreFormatErrors) {
  EXPECT_THROW(rmis::load_mask("P6\n1 1\n255\nabc", MaskFormat::GrayscaleImage), rmis::FormatError);
  EXPECT_THROW(rmis::load_mask("P3\n1 1\n255\n1 2 3\n", MaskFormat::GrayscaleImage), rmis::FormatError);
}

TEST(Pgm, ShortPayloadIsADecodeError) {
  EXPECT_THROW(rmis::load_mask("P5\n4 4\n255\nab", MaskFormat::GrayscaleImage), rmis::DecodeError);
}

TEST(MaskFiles, FormatFollowsExtension) {
  testutil::TempDir dir;
  std::mt19937 rng(8);
  const auto m = testutil::random_mask(rng, 16, 12, 3);
  for (const char* name : {"a.png", "a.pgm", "a.txt", "a.grid"}) {
    rmis::save_mask_file(m, dir / name);
    EXPECT_EQ(rmis::load_mask_file(dir / name), m) << name;
  }
}

TEST(MaskFiles, ErrorsNameTheFile) {
  testutil::TempDir dir;
  testutil::spit(dir / "bad.png", "garbage");
  try {
    rmis::load_mask_file(dir / "bad.png");
    FAIL() << "expected a decode error";
  } catch (const rmis::DecodeError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.png"), std::string::npos);
  }
  EXPECT_THROW(rmis::load_mask_file(dir / "absent.png"), rmis::DecodeError);
}
