#include "safa/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "safa/errors.hpp"

namespace safa {
namespace {

constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_safa(const LatentMap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 4 * map.size());
  for (char ch : std::string_view("SAFA")) out.push_back(static_cast<std::uint8_t>(ch));
  put_u32(out, static_cast<std::uint32_t>(map.channels()));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  for (double v : map.data()) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

LatentMap decode_safa(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), "SAFA", 4) != 0) {
    throw FormatError("not a SAFA tensor (bad magic)");
  }
  const std::uint64_t c = get_u32(bytes.data() + 4);
  const std::uint64_t h = get_u32(bytes.data() + 8);
  const std::uint64_t w = get_u32(bytes.data() + 12);
  if (c == 0 || h == 0 || w == 0) throw FormatError("SAFA header has a zero dimension");
  const std::uint64_t n = c * h * w;
  if (bytes.size() != kHeaderBytes + 4 * n) {
    throw FormatError("SAFA payload length does not match header shape");
  }
  std::vector<double> data(n);
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  for (std::uint64_t i = 0; i < n; ++i) {
    data[i] = std::bit_cast<float>(get_u32(p + 4 * i));
  }
  LatentMap m(c, h, w, std::move(data));
  if (!m.all_finite()) throw FormatError("SAFA payload contains non-finite values");
  return m;
}

void write_safa(const std::filesystem::path& path, const LatentMap& map) {
  const auto bytes = encode_safa(map);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing " + path.string());
}

LatentMap read_safa(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_safa(bytes);
}

LatentMap round_to_float32(const LatentMap& map) {
  LatentMap out = map;
  for (double& v : out.data()) v = static_cast<float>(v);
  return out;
}

void write_pgm(const std::filesystem::path& path, const LatentMap& map, std::size_t channel) {
  if (channel >= map.channels()) throw IndexError("write_pgm: channel out of range");
  double lo = map(channel, 0, 0);
  double hi = lo;
  for (std::size_t h = 0; h < map.height(); ++h) {
    for (double v : map.row(channel, h)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << "P5\n" << map.width() << ' ' << map.height() << "\n255\n";
  std::vector<char> row(map.width());
  for (std::size_t h = 0; h < map.height(); ++h) {
    auto src = map.row(channel, h);
    for (std::size_t w = 0; w < map.width(); ++w) {
      const double u = std::clamp((src[w] - lo) / span, 0.0, 1.0);
      row[w] = static_cast<char>(static_cast<unsigned char>(std::lround(u * 255.0)));
    }
    f.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace safa
