#include "qrng/sample_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "qrng/error.hpp"

namespace qrng {
namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename T>
bool get_le(std::istream& is, T& v) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) return false;
  v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return true;
}

}  // namespace

void write_samples_binary(std::ostream& os, const SampleSet& samples) {
  if (samples.n_bits < 1 || samples.n_bits > 24) throw InvalidParameter("sample file: n must lie in [1, 24]");
  os.write(kSampleMagic, 4);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(samples.n_bits));
  put_le<std::uint64_t>(os, samples.codes.size());
  const bool wide = samples.n_bits > 16;
  for (auto c : samples.codes) {
    if (c >> samples.n_bits) throw InvalidParameter("sample file: code exceeds bit depth");
    if (wide) put_le<std::uint32_t>(os, c); else put_le<std::uint16_t>(os, static_cast<std::uint16_t>(c));
  }
}

SampleSet read_samples_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kSampleMagic, 4) != 0)
    throw DataFormatError("sample file: bad magic");
  std::uint32_t n = 0;
  std::uint64_t count = 0;
  if (!get_le(is, n) || !get_le(is, count)) throw DataFormatError("sample file: truncated header");
  if (n < 1 || n > 24) throw DataFormatError("sample file: bit depth out of range");
  SampleSet s;
  s.n_bits = static_cast<int>(n);
  s.codes.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 26)));
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t c = 0;
    bool ok;
    if (n > 16) {
      ok = get_le(is, c);
    } else {
      std::uint16_t c16 = 0;
      ok = get_le(is, c16);
      c = c16;
    }
    if (!ok) throw DataFormatError("sample file: truncated after " + std::to_string(i) + " samples");
    if (c >> n) throw DataFormatError("sample file: code exceeds bit depth at sample " + std::to_string(i));
    s.codes.push_back(c);
  }
  return s;
}

void write_samples_csv(std::ostream& os, std::span<const std::uint32_t> codes) {
  for (auto c : codes) os << c << '\n';
}

SampleSet read_samples_csv(std::istream& is) {
  SampleSet s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "code") continue;
    if (line.size() > 9 || line.find_first_not_of("0123456789") != std::string::npos)
      throw DataFormatError("sample csv: expected a non-negative bin index", line_no);
    s.codes.push_back(static_cast<std::uint32_t>(std::stoul(line)));
  }
  return s;
}

SampleSet read_samples_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open " + path.string());
  char head[4] = {};
  in.read(head, 4);
  const bool binary = in.gcount() == 4 && std::memcmp(head, kSampleMagic, 4) == 0;
  in.clear();
  in.seekg(0);
  return binary ? read_samples_binary(in) : read_samples_csv(in);
}

void write_samples_file(const std::filesystem::path& path, const SampleSet& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write " + path.string());
  if (path.extension() == ".csv") write_samples_csv(out, samples.codes);
  else write_samples_binary(out, samples);
}

void write_bits_file(const std::filesystem::path& path, const BitBuffer& bits) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write " + path.string());
  const auto bytes = bits.to_bytes();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

BitBuffer read_bits_file(const std::filesystem::path& path, std::size_t bits) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() * 8 < bits) throw DataFormatError("bit file shorter than requested length");
  return BitBuffer::from_bytes(bytes, bits);
}

}  // namespace qrng
