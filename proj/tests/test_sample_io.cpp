#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qrng/error.hpp"
#include "qrng/sample_io.hpp"

using namespace qrng;
namespace fs = std::filesystem;

namespace {

SampleSet random_samples(int n, std::size_t count, unsigned seed) {
  std::mt19937 eng(seed);
  SampleSet s{n, std::vector<std::uint32_t>(count)};
  for (auto& c : s.codes) c = eng() & ((1u << n) - 1);
  return s;
}

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "qrng_test_sample_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("binary round trip for narrow and wide samples") {
  for (int n : {1, 8, 12, 16, 17, 24}) {
    const auto s = random_samples(n, 1000, n);
    std::stringstream ss;
    write_samples_binary(ss, s);
    CHECK(ss.str().size() == 16 + 1000 * (n <= 16 ? 2 : 4));
    const auto back = read_samples_binary(ss);
    CHECK(back.n_bits == n);
    CHECK(back.codes == s.codes);
  }
}

TEST_CASE("binary header layout") {
  std::stringstream ss;
  write_samples_binary(ss, SampleSet{10, {1, 1023}});
  const auto b = ss.str();
  CHECK(b.substr(0, 4) == "QRNS");
  CHECK(static_cast<unsigned char>(b[4]) == 10);
  CHECK(static_cast<unsigned char>(b[8]) == 2);
  CHECK(static_cast<unsigned char>(b[18]) == 0xff);
  CHECK(static_cast<unsigned char>(b[19]) == 0x03);
}

TEST_CASE("binary reader rejects damaged files") {
  std::stringstream ss;
  write_samples_binary(ss, random_samples(8, 100, 1));
  const auto good = ss.str();

  auto bad = good;
  bad[0] = 'X';
  std::istringstream a(bad);
  CHECK_THROWS_AS(read_samples_binary(a), DataFormatError);

  std::istringstream b(good.substr(0, good.size() - 3));
  CHECK_THROWS_AS(read_samples_binary(b), DataFormatError);

  std::istringstream c(good.substr(0, 10));
  CHECK_THROWS_AS(read_samples_binary(c), DataFormatError);

  auto wide = good;
  wide[16] = '\xff';
  wide[17] = '\x01';
  std::istringstream d(wide);
  CHECK_THROWS_AS(read_samples_binary(d), DataFormatError);

  CHECK_THROWS_AS(write_samples_binary(ss, SampleSet{4, {16}}), InvalidParameter);
}

TEST_CASE("csv round trip and errors") {
  const auto s = random_samples(10, 500, 2);
  std::stringstream ss;
  write_samples_csv(ss, s.codes);
  CHECK(read_samples_csv(ss).codes == s.codes);

  std::istringstream h("code\n3\n4\n");
  CHECK(read_samples_csv(h).codes == std::vector<std::uint32_t>{3, 4});

  std::istringstream e("code\n3\nfour\n");
  try {
    read_samples_csv(e);
    FAIL("expected DataFormatError");
  } catch (const DataFormatError& err) {
    CHECK(err.line() == 3);
  }
  std::istringstream neg("1\n-2\n");
  CHECK_THROWS_AS(read_samples_csv(neg), DataFormatError);
}

TEST_CASE("file readers detect the format") {
  const auto s = random_samples(12, 300, 3);
  const auto bin = temp_file("s.bin");
  write_samples_file(bin, s);
  CHECK(read_samples_file(bin).codes == s.codes);
  CHECK(read_samples_file(bin).n_bits == 12);

  const auto csv = temp_file("s.csv");
  {
    std::ofstream out(csv);
    write_samples_csv(out, s.codes);
  }
  const auto c = read_samples_file(csv);
  CHECK(c.codes == s.codes);
  CHECK(c.n_bits == 0);

  CHECK_THROWS_AS(read_samples_file(temp_file("missing.bin")), DataFormatError);
}

TEST_CASE("bit files") {
  std::mt19937_64 eng(4);
  BitBuffer b;
  for (int i = 0; i < 1001; ++i) b.push_back(eng() & 1);
  const auto p = temp_file("bits.bin");
  write_bits_file(p, b);
  CHECK(fs::file_size(p) == 126);
  CHECK(read_bits_file(p, 1001) == b);
  CHECK(read_bits_file(p, 64) == b.slice(0, 64));
  CHECK_THROWS_AS(read_bits_file(p, 1009), DataFormatError);
}
