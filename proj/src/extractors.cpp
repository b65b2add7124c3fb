#include "qrng/extractors.hpp"

#include <bit>
#include <cmath>

#include "qrng/error.hpp"

namespace qrng {

BitBuffer BitBuffer::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits) {
  if (bits > bytes.size() * 8) throw InvalidParameter("from_bytes: not enough bytes");
  BitBuffer b(bits);
  for (std::size_t i = 0; i < bits; ++i) b.set(i, (bytes[i >> 3] >> (i & 7)) & 1U);
  return b;
}

BitBuffer BitBuffer::from_bits(std::span<const std::uint8_t> bits) {
  BitBuffer b(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) b.set(i, bits[i] != 0);
  return b;
}

void BitBuffer::push_back(bool bit) {
  if ((size_ & 63) == 0) words_.push_back(0);
  ++size_;
  set(size_ - 1, bit);
}

void BitBuffer::append_bits(std::uint64_t value, unsigned count) {
  if (count == 0) return;
  if (count < 64) value &= (std::uint64_t{1} << count) - 1;
  const unsigned used = size_ & 63;
  if (used == 0) {
    words_.push_back(value);
  } else {
    words_.back() |= value << used;
    if (used + count > 64) words_.push_back(value >> (64 - used));
  }
  size_ += count;
}

void BitBuffer::append(const BitBuffer& other) {
  std::size_t i = 0;
  for (; i + 64 <= other.size_; i += 64) append_bits(other.words_[i >> 6], 64);
  if (i < other.size_) append_bits(other.extract(i, static_cast<unsigned>(other.size_ - i)),
                                   static_cast<unsigned>(other.size_ - i));
}

std::uint64_t BitBuffer::extract(std::size_t start, unsigned length) const {
  const std::size_t idx = start >> 6;
  const unsigned sh = start & 63;
  if (idx >= words_.size()) return 0;
  std::uint64_t v = words_[idx] >> sh;
  if (sh != 0 && idx + 1 < words_.size()) v |= words_[idx + 1] << (64 - sh);
  if (length < 64) v &= (std::uint64_t{1} << length) - 1;
  return v;
}

BitBuffer BitBuffer::slice(std::size_t start, std::size_t length) const {
  if (start + length > size_) throw InvalidParameter("slice out of range");
  BitBuffer out;
  out.words_.reserve((length + 63) / 64);
  std::size_t i = 0;
  for (; i + 64 <= length; i += 64) out.append_bits(extract(start + i), 64);
  if (i < length) {
    const auto rest = static_cast<unsigned>(length - i);
    out.append_bits(extract(start + i, rest), rest);
  }
  return out;
}

std::size_t BitBuffer::popcount() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::uint8_t> BitBuffer::to_bytes() const {
  std::vector<std::uint8_t> out((size_ + 7) / 8);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>(words_[i >> 3] >> (8 * (i & 7)));
  return out;
}

BitBuffer BitBuffer::operator^(const BitBuffer& other) const {
  if (other.size_ != size_) throw InvalidParameter("xor of buffers with different lengths");
  BitBuffer out(*this);
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] ^= other.words_[i];
  return out;
}

// ---------------------------------------------------------------------------

ToeplitzSeed::ToeplitzSeed(BitBuffer bits, std::size_t rows, std::size_t cols)
    : bits_(std::move(bits)), rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw InvalidParameter("Toeplitz matrix needs rows, cols >= 1");
  if (bits_.size() != rows + cols - 1)
    throw InvalidParameter("Toeplitz seed must hold exactly rows + cols - 1 bits");
}

std::size_t ExtractorConfig::out_len() const {
  return static_cast<std::size_t>(std::floor(static_cast<double>(block_len) / gamma_adc));
}

void ExtractorConfig::validate() const {
  if (block_len < 1) throw InvalidParameter("extractor block length must be >= 1");
  if (!(gamma_adc >= 1.0)) throw InvalidParameter("gamma_adc must be >= 1");
  if (out_len() < 1) throw InvalidParameter("gamma_adc leaves no output bits per block");
}

ExtractorConfig ExtractorConfig::from_report(std::size_t block_len, const ReductionReport& report) {
  ExtractorConfig cfg{block_len, report.gamma_total.value()};
  cfg.validate();
  return cfg;
}

BitBuffer von_neumann(const BitBuffer& input) {
  BitBuffer out;
  for (std::size_t i = 0; i + 1 < input.size(); i += 2) {
    const bool a = input.get(i);
    if (a != input.get(i + 1)) out.push_back(a);
  }
  return out;
}

BitBuffer toeplitz_hash(const BitBuffer& raw, const ToeplitzSeed& seed, std::size_t out_len) {
  const std::size_t n = raw.size();
  if (seed.rows() != out_len || seed.cols() != n)
    throw InvalidParameter("toeplitz_hash: seed shape does not match (M, N)");

  BitBuffer reversed(n);
  for (std::size_t j = 0; j < n; ++j) reversed.set(j, raw.get(n - 1 - j));
  const auto& rev = reversed.words();
  const auto& s = seed.bits();

  BitBuffer out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < rev.size(); ++k) acc ^= s.extract(i + 64 * k) & rev[k];
    out.set(i, std::popcount(acc) & 1);
  }
  return out;
}

SeedDraw generate_seed(const BitBuffer& raw, std::size_t needed) {
  BitBuffer seed;
  std::size_t i = 0;
  for (; seed.size() < needed && i + 1 < raw.size(); i += 2) {
    const bool a = raw.get(i);
    if (a != raw.get(i + 1)) seed.push_back(a);
  }
  if (seed.size() < needed) throw NeedsMoreEntropy(needed - seed.size());
  return {std::move(seed), i};
}

ExtractionResult extraction_pipeline(const BitBuffer& raw, const ReductionReport& report,
                                     const ExtractorConfig& cfg, const std::optional<BitBuffer>& seed) {
  if (report.gamma_total.is_untrusted())
    throw UntrustedSource("extraction refused: reduction factor is infinite");
  ExtractorConfig c = cfg;
  c.gamma_adc = report.gamma_total.value();
  c.validate();

  ExtractionResult res;
  res.block_len = c.block_len;
  res.out_len = c.out_len();
  res.gamma_adc = c.gamma_adc;
  const std::size_t needed = res.out_len + res.block_len - 1;

  std::size_t start = 0;
  if (seed) {
    res.seed = *seed;
  } else {
    // Debias a growing head of the raw stream until the seed is filled.
    std::size_t head = std::min(raw.size(), 4 * needed);
    for (;;) {
      try {
        auto draw = generate_seed(raw.slice(0, head), needed);
        res.seed = std::move(draw.seed);
        res.seed_raw_bits = start = draw.consumed_raw_bits;
        break;
      } catch (const NeedsMoreEntropy&) {
        if (head == raw.size()) throw;
        head = std::min(raw.size(), 2 * head);
      }
    }
  }
  const ToeplitzSeed toeplitz(res.seed, res.out_len, res.block_len);

  if (raw.size() < start + res.block_len)
    throw InvalidParameter("extraction_pipeline: raw input shorter than one block");
  res.blocks = (raw.size() - start) / res.block_len;
  for (std::size_t b = 0; b < res.blocks; ++b)
    res.output.append(toeplitz_hash(raw.slice(start + b * res.block_len, res.block_len), toeplitz,
                                    res.out_len));
  return res;
}

BitBuffer codes_to_bits(std::span<const std::uint32_t> codes, int n) {
  if (n < 1 || n > 32) throw InvalidParameter("codes_to_bits: n must lie in [1, 32]");
  BitBuffer out;
  for (auto c : codes) out.append_bits(c, static_cast<unsigned>(n));
  return out;
}

}  // namespace qrng
