#include "neb/io/image.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace neb {

namespace {

static_assert(std::endian::native == std::endian::little, "PFM writer assumes a little-endian host");

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t offset, const std::string& what) {
  throw ImageError(path.string() + ": " + what + " at byte " + std::to_string(offset));
}

// Reads a whitespace-delimited header token starting at `pos`.
std::string header_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  return data.substr(start, pos - start);
}

}  // namespace

void write_pfm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageError(path.string() + ": cannot open for writing");
  out << "PF\n" << image.width << ' ' << image.height << "\n-1.0\n";
  for (int y = image.height - 1; y >= 0; --y) {
    out.write(reinterpret_cast<const char*>(image.pixel(0, y)),
              static_cast<std::streamsize>(sizeof(float) * 3 * image.width));
  }
  if (!out) throw ImageError(path.string() + ": write failed");
}

Image read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();

  std::size_t pos = 0;
  const std::string magic = header_token(data, pos);
  if (magic != "PF") malformed(path, 0, "expected magic 'PF'");
  std::size_t field_start = pos;
  const auto parse_int = [&](const std::string& token) {
    int v = 0;
    std::size_t used = 0;
    try {
      v = std::stoi(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || token.empty() || v <= 0) malformed(path, field_start, "invalid image dimension");
    return v;
  };
  const int width = parse_int(header_token(data, pos));
  field_start = pos;
  const int height = parse_int(header_token(data, pos));
  field_start = pos;
  const std::string scale_token = header_token(data, pos);
  double scale = 0.0;
  try {
    scale = std::stod(scale_token);
  } catch (const std::exception&) {
    malformed(path, field_start, "invalid scale");
  }
  if (scale >= 0.0) malformed(path, field_start, "big-endian PFM not supported");
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
    malformed(path, pos, "missing header terminator");
  }
  ++pos;  // single whitespace byte before the raster

  Image image(width, height);
  const std::size_t row_bytes = sizeof(float) * 3 * static_cast<std::size_t>(width);
  const std::size_t needed = row_bytes * height;
  if (data.size() - pos < needed) malformed(path, data.size(), "truncated raster (expected " +
                                                                   std::to_string(pos + needed) + " bytes)");
  for (int y = height - 1; y >= 0; --y) {
    std::memcpy(image.pixel(0, y), data.data() + pos, row_bytes);
    pos += row_bytes;
  }
  return image;
}

}  // namespace neb
