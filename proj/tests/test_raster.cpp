#include <gtest/gtest.h>

#include <fstream>

#include "landchange/error.hpp"
#include "landchange/raster.hpp"
#include "test_util.hpp"

using namespace landchange;

TEST(Raster, ConstructionAndAccess) {
  Raster r(3, 2, 0.25f);
  EXPECT_EQ(r.width(), 3);
  EXPECT_EQ(r.height(), 2);
  EXPECT_EQ(r.size(), 6u);
  r.at(2, 1) = 1.0f;
  EXPECT_FLOAT_EQ(r.at(2, 1), 1.0f);
  EXPECT_FLOAT_EQ(r.row(1)[2], 1.0f);
  EXPECT_NEAR(r.mean(), (5 * 0.25 + 1.0) / 6.0, 1e-12);
}

TEST(Raster, RejectsBadDimensions) {
  EXPECT_THROW(Raster(-1, 2), ConfigError);
  EXPECT_THROW(Raster(2, 2, std::vector<float>(3)), ConfigError);
}

TEST(Raster, ClampedReplicatesBorder) {
  Raster r(2, 2, std::vector<float>{1, 2, 3, 4});
  EXPECT_FLOAT_EQ(r.clamped(-5, -5), 1.0f);
  EXPECT_FLOAT_EQ(r.clamped(9, 0), 2.0f);
  EXPECT_FLOAT_EQ(r.clamped(0, 9), 3.0f);
  EXPECT_FLOAT_EQ(r.clamped(9, 9), 4.0f);
}

TEST(Raster, DownsampleAveragesAndDropsOddEdge) {
  Raster r(5, 3, std::vector<float>{1, 3, 5, 7, 100, 1, 3, 5, 7, 100, 9, 9, 9, 9, 9});
  const Raster d = downsample_2x2(r);
  ASSERT_EQ(d.width(), 2);
  ASSERT_EQ(d.height(), 1);
  EXPECT_FLOAT_EQ(d.at(0, 0), 2.0f);
  EXPECT_FLOAT_EQ(d.at(1, 0), 6.0f);
  EXPECT_THROW(downsample_2x2(Raster(1, 4)), ConfigError);
}

TEST(ImageIo, PngRoundTripQuantizesTo8Bits) {
  testutil::TempDir dir;
  Raster r(7, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x) r.at(x, y) = static_cast<float>((x * 5 + y) / 40.0);
  const auto path = dir / "a.png";
  save_png(r, path);
  const ImageSize size = probe_image_size(path);
  EXPECT_EQ(size.width, 7);
  EXPECT_EQ(size.height, 5);
  const Raster back = load_image(path);
  ASSERT_EQ(back.width(), 7);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x) EXPECT_NEAR(back.at(x, y), r.at(x, y), 0.5 / 255.0 + 1e-6);
}

TEST(ImageIo, RgbPngConvertsWithLuma) {
  testutil::TempDir dir;
  RgbImage img(2, 1);
  img.set(0, 0, 255, 0, 0);
  img.set(1, 0, 0, 0, 255);
  img.set(5, 5, 1, 2, 3);  // outside: ignored
  save_png(img, dir / "c.png");
  const Raster g = load_image(dir / "c.png");
  EXPECT_NEAR(g.at(0, 0), kLumaRed, 1e-3);
  EXPECT_NEAR(g.at(1, 0), kLumaBlue, 1e-3);
}

TEST(ImageIo, ReadsBinaryPgmWithComments) {
  testutil::TempDir dir;
  {
    std::ofstream out(dir / "a.pgm", std::ios::binary);
    out << "P5\n# comment\n3 1\n255\n";
    const unsigned char px[3] = {0, 51, 255};
    out.write(reinterpret_cast<const char*>(px), 3);
  }
  const Raster r = load_image(dir / "a.pgm");
  ASSERT_EQ(r.width(), 3);
  EXPECT_FLOAT_EQ(r.at(0, 0), 0.0f);
  EXPECT_NEAR(r.at(1, 0), 0.2, 1e-6);
  EXPECT_FLOAT_EQ(r.at(2, 0), 1.0f);
}

TEST(ImageIo, ReadsSixteenBitPgm) {
  testutil::TempDir dir;
  {
    std::ofstream out(dir / "b.pgm", std::ios::binary);
    out << "P5 2 1 65535\n";
    const unsigned char px[4] = {0xFF, 0xFF, 0x80, 0x00};
    out.write(reinterpret_cast<const char*>(px), 4);
  }
  const Raster r = load_image(dir / "b.pgm");
  EXPECT_FLOAT_EQ(r.at(0, 0), 1.0f);
  EXPECT_NEAR(r.at(1, 0), 32768.0 / 65535.0, 1e-6);
}

TEST(ImageIo, ErrorsAreClassified) {
  testutil::TempDir dir;
  EXPECT_THROW(load_image(dir / "missing.png"), IoError);
  {
    std::ofstream out(dir / "junk.png");
    out << "definitely not an image";
  }
  EXPECT_THROW(load_image(dir / "junk.png"), FormatError);
  {
    std::ofstream out(dir / "short.pgm", std::ios::binary);
    out << "P5 4 4 255\n12";
  }
  EXPECT_THROW(load_image(dir / "short.pgm"), FormatError);
  EXPECT_THROW(save_png(Raster(), dir / "e.png"), ConfigError);
}
