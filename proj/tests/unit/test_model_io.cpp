#include <cstring>
#include <sstream>

#include "doctest.h"
#include "matmat/errors.hpp"
#include "matmat/model_io.hpp"
#include "oracles.hpp"

using namespace matmat;

namespace {

TrainConfig small(std::uint64_t seed) {
  TrainConfig c;
  c.d = 3;
  c.seed = seed;
  c.clamp = {1.0, 4.5};
  return c;
}

}  // namespace

TEST_CASE("models survive a save/load round trip bit for bit") {
  auto dir = oracle::temp_dir("model_io");
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    MatMatModel m = init_matmat(small(seed), 4, 7, 2, 5.0);
    save_model(dir / "m.bin", m);
    CHECK(std::get<MatMatModel>(load_model(dir / "m.bin")) == m);

    ClassicModel c = init_classic(small(seed), 5, 3, 4.0);
    save_model(dir / "c.bin", c);
    CHECK(std::get<ClassicModel>(load_model(dir / "c.bin")) == c);
  }
}

TEST_CASE("header layout is little-endian at documented offsets") {
  MatMatModel m = init_matmat(small(1), 2, 3, 2, 5.0);
  std::ostringstream out;
  write_model(out, m);
  const std::string bytes = out.str();
  REQUIRE(bytes.size() == 72 + (2 * 2 * 3 + 3 * 3 * 2) * 8);
  CHECK(bytes.substr(0, 8) == std::string("MATMATv\0", 8));
  auto u32 = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(bytes[off + k]);
    return v;
  };
  auto u64 = [&](std::size_t off) {
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(bytes[off + k]);
    return v;
  };
  auto f64 = [&](std::size_t off) {
    std::uint64_t bits = u64(off);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  };
  CHECK(u32(8) == 1);
  CHECK(u32(12) == 1);
  CHECK(u64(16) == 2);
  CHECK(u64(24) == 3);
  CHECK(u64(32) == 2);
  CHECK(u64(40) == 3);
  CHECK(f64(48) == 5.0);
  CHECK(f64(56) == 1.0);
  CHECK(f64(64) == 4.5);
  CHECK(f64(72) == m.U.flat()[0]);
  CHECK(f64(72 + 12 * 8) == m.V.flat()[0]);
}

TEST_CASE("corrupt model files are rejected") {
  std::istringstream junk("not a model at all, definitely not");
  CHECK_THROWS_AS(read_model(junk), IoError);

  MatMatModel m = init_matmat(small(1), 2, 3, 2, 5.0);
  std::ostringstream out;
  write_model(out, m);
  std::string truncated = out.str().substr(0, out.str().size() - 5);
  std::istringstream in(truncated);
  CHECK_THROWS_AS(read_model(in), IoError);

  std::string bad_version = out.str();
  bad_version[8] = 9;
  std::istringstream in2(bad_version);
  CHECK_THROWS_AS(read_model(in2), IoError);

  CHECK_THROWS_AS(load_model("/nonexistent/model.bin"), IoError);
}

TEST_CASE("algorithm names") {
  CHECK(parse_algorithm("classic") == Algorithm::classic);
  CHECK(parse_algorithm("matmat") == Algorithm::matmat);
  CHECK(to_string(Algorithm::matmat) == "matmat");
  CHECK_THROWS_AS(parse_algorithm("adam"), ConfigError);
}
