#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qrng/entropy_reduction.hpp"

namespace qrng {

/// Packed bit sequence. Bit i lives in word i / 64 at position i % 64, so the
/// little-endian byte image is LSB-first within each byte. Storage beyond
/// size() is always zero.
class BitBuffer {
 public:
  BitBuffer() = default;
  explicit BitBuffer(std::size_t size) : words_((size + 63) / 64, 0), size_(size) {}

  static BitBuffer from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits);
  static BitBuffer from_bits(std::span<const std::uint8_t> bits);  // one 0/1 per element

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool bit) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (bit) words_[i >> 6] |= m; else words_[i >> 6] &= ~m;
  }
  void push_back(bool bit);
  /// Append the low `count` bits of `value`, least significant first.
  void append_bits(std::uint64_t value, unsigned count);
  void append(const BitBuffer& other);

  BitBuffer slice(std::size_t start, std::size_t length) const;
  /// `length` bits starting at `start`, in the low bits of the result (length <= 64).
  std::uint64_t extract(std::size_t start, unsigned length = 64) const;

  std::size_t popcount() const;
  std::vector<std::uint8_t> to_bytes() const;
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  BitBuffer operator^(const BitBuffer& other) const;
  bool operator==(const BitBuffer& other) const = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// Seed of a Toeplitz matrix with `rows` rows and `cols` columns: rows + cols - 1 bits.
class ToeplitzSeed {
 public:
  ToeplitzSeed(BitBuffer bits, std::size_t rows, std::size_t cols);

  const BitBuffer& bits() const noexcept { return bits_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

 private:
  BitBuffer bits_;
  std::size_t rows_;
  std::size_t cols_;
};

/// Block lengths for hashing; out_len = floor(block_len / gamma_adc).
struct ExtractorConfig {
  std::size_t block_len = 4096;
  double gamma_adc = 1.0;

  std::size_t out_len() const;
  void validate() const;
  /// Takes gamma_adc from report.gamma_total; throws UntrustedSource for the sentinel.
  static ExtractorConfig from_report(std::size_t block_len, const ReductionReport& report);
};

/// Pairs 01 -> 0, 10 -> 1, 00/11 dropped; a trailing odd bit is dropped.
BitBuffer von_neumann(const BitBuffer& input);

/// out[i] = XOR_j T[i][j] raw[j] with T[i][j] = seed[i - j + N - 1]: the first
/// row is seed[N-1 .. 0] and the first column seed[N-1 .. M+N-2].
/// Word-parallel: row i is the seed window [i, i+N) against the reversed input.
BitBuffer toeplitz_hash(const BitBuffer& raw, const ToeplitzSeed& seed, std::size_t out_len);

struct SeedDraw {
  BitBuffer seed;
  std::size_t consumed_raw_bits;
};

/// First `needed` von Neumann output bits of `raw`, plus how many raw bits they used.
/// Throws NeedsMoreEntropy with the deficit when the input is too short.
SeedDraw generate_seed(const BitBuffer& raw, std::size_t needed);

struct ExtractionResult {
  BitBuffer output;
  BitBuffer seed;
  std::size_t block_len = 0;
  std::size_t out_len = 0;
  std::size_t blocks = 0;
  std::size_t seed_raw_bits = 0;  // raw bits consumed by seed generation
  double gamma_adc = 0.0;
};

/// Hash every full block of `raw` with one Toeplitz seed reused across blocks.
/// Without an explicit seed, the seed is debiased from the head of `raw` and
/// those bits are not hashed.
ExtractionResult extraction_pipeline(const BitBuffer& raw, const ReductionReport& report,
                                     const ExtractorConfig& cfg,
                                     const std::optional<BitBuffer>& seed = std::nullopt);

/// Samples of `n` bits each, least significant bit first.
BitBuffer codes_to_bits(std::span<const std::uint32_t> codes, int n);

}  // namespace qrng
