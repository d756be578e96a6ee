#include "neb/io/image.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

namespace neb {
namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("neb_io_" + name);
}

Image random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 10.0f);
  Image img(w, h);
  for (float& v : img.rgb) v = u(rng);
  return img;
}

TEST(Pfm, SinglePixelRoundTrip) {
  Image img(1, 1);
  img.pixel(0, 0)[0] = 0.5f;
  img.pixel(0, 0)[1] = 1.0f;
  img.pixel(0, 0)[2] = 2.0f;
  const auto path = temp_file("one.pfm");
  write_pfm(img, path);
  const Image back = read_pfm(path);
  ASSERT_EQ(back.width, 1);
  ASSERT_EQ(back.height, 1);
  EXPECT_EQ(back.rgb, img.rgb);
}

TEST(Pfm, RandomImageRoundTripIsBitExact) {
  const Image img = random_image(64, 48, 1);
  const auto path = temp_file("rand.pfm");
  write_pfm(img, path);
  const Image back = read_pfm(path);
  ASSERT_EQ(back.rgb.size(), img.rgb.size());
  EXPECT_EQ(std::memcmp(back.rgb.data(), img.rgb.data(), img.rgb.size() * sizeof(float)), 0);
}

TEST(Pfm, LayoutIsLittleEndianBottomUp) {
  Image img(1, 2);
  img.pixel(0, 0)[0] = 1.0f;  // top row
  img.pixel(0, 1)[0] = 2.0f;
  const auto path = temp_file("layout.pfm");
  write_pfm(img, path);
  std::ifstream in(path, std::ios::binary);
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string header = "PF\n1 2\n-1.0\n";
  ASSERT_EQ(data.substr(0, header.size()), header);
  float first;
  std::memcpy(&first, data.data() + header.size(), sizeof(float));
  EXPECT_EQ(first, 2.0f);
  // 2.0f is 0x40000000: most significant byte last.
  EXPECT_EQ(static_cast<unsigned char>(data[header.size() + 3]), 0x40);
}

TEST(Pfm, MalformedInputReportsByteOffset) {
  const auto path = temp_file("bad.pfm");
  const auto message = [&](const std::string& contents) {
    std::ofstream(path, std::ios::binary) << contents;
    try {
      read_pfm(path);
    } catch (const ImageError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("P6\n1 1\n255\n").find("at byte 0"), std::string::npos);
  EXPECT_NE(message("PF\nx 1\n-1.0\n").find("invalid image dimension at byte 2"), std::string::npos);
  EXPECT_NE(message("PF\n1 1\n1.0\n").find("big-endian"), std::string::npos);
  const std::string truncated = message("PF\n2 2\n-1.0\n" + std::string(20, '\0'));
  EXPECT_NE(truncated.find("truncated raster"), std::string::npos) << truncated;
  EXPECT_NE(truncated.find("at byte 32"), std::string::npos) << truncated;
  EXPECT_THROW(read_pfm(temp_file("does_not_exist.pfm")), ImageError);
}

TEST(Rmse, IdenticalAndOffset) {
  const Image a = random_image(16, 16, 2);
  EXPECT_EQ(rmse(a, a), 0.0);
  Image b = a;
  for (float& v : b.rgb) v += 0.25f;
  EXPECT_NEAR(rmse(a, b), 0.25, 1e-6);
  EXPECT_THROW(rmse(a, Image(8, 16)), ImageError);
}

TEST(Rmse, MatchesLoopOracle) {
  for (int s = 0; s < 10; ++s) {
    const Image a = random_image(13, 7, 10 + s), b = random_image(13, 7, 20 + s);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rgb.size(); ++i) {
      const double d = static_cast<double>(a.rgb[i]) - b.rgb[i];
      sum += d * d;
    }
    EXPECT_NEAR(rmse(a, b), std::sqrt(sum / a.rgb.size()), 1e-9);
  }
}

TEST(Rmse, MaskSelectsPixels) {
  Image a(2, 1), b(2, 1);
  a.pixel(1, 0)[0] = 3.0f;
  EXPECT_NEAR(rmse(a, b, {false, true}), std::sqrt(9.0 / 3.0), 1e-12);
  EXPECT_EQ(rmse(a, b, {true, false}), 0.0);
}

TEST(Tonemap, BlackMonotoneBounded) {
  EXPECT_EQ(tonemap_channel(0.0f), 0);
  EXPECT_EQ(tonemap_channel(-1.0f), 0);
  EXPECT_LT(tonemap_channel(1e6f), 255);
  int previous = 0;
  for (float v = 0.0f; v < 1e4f; v = v * 1.01f + 1e-4f) {
    const int c = tonemap_channel(v);
    EXPECT_GE(c, previous);
    previous = c;
  }
}

TEST(Png, WritesSignature) {
  const auto path = temp_file("out.png");
  write_tonemapped_png(random_image(5, 3, 4), path);
  std::ifstream in(path, std::ios::binary);
  char sig[8];
  in.read(sig, 8);
  EXPECT_EQ(std::string(sig + 1, 3), "PNG");
  EXPECT_THROW(write_tonemapped_png(Image(1, 1), "/nonexistent-dir/x.png"), ImageError);
}

TEST(Image, MeanLuminance) {
  Image img(2, 1);
  for (float& v : img.rgb) v = 2.0f;
  EXPECT_NEAR(mean_luminance(img), 2.0, 1e-9);
}

}  // namespace
}  // namespace neb
