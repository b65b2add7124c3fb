#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "qrng/extractors.hpp"

namespace qrng {

/// Quantized ADC samples. `n_bits` is 0 when the source did not record it.
struct SampleSet {
  int n_bits = 0;
  std::vector<std::uint32_t> codes;
};

/// Binary sample file: 16-byte little-endian header
///   bytes 0-3   magic "QRNS"
///   bytes 4-7   uint32 bit depth n (1..24)
///   bytes 8-15  uint64 sample count
/// followed by the samples as uint16 (n <= 16) or uint32 (n > 16), little-endian.
inline constexpr char kSampleMagic[4] = {'Q', 'R', 'N', 'S'};

void write_samples_binary(std::ostream& os, const SampleSet& samples);
SampleSet read_samples_binary(std::istream& is);

/// CSV: one bin index per line; an optional `code` header line is accepted.
void write_samples_csv(std::ostream& os, std::span<const std::uint32_t> codes);
SampleSet read_samples_csv(std::istream& is);

/// Picks the reader from the file's leading bytes.
SampleSet read_samples_file(const std::filesystem::path& path);
void write_samples_file(const std::filesystem::path& path, const SampleSet& samples);

/// Packed LSB-first bytes.
void write_bits_file(const std::filesystem::path& path, const BitBuffer& bits);
BitBuffer read_bits_file(const std::filesystem::path& path, std::size_t bits);

}  // namespace qrng
