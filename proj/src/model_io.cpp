#include "matmat/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "matmat/errors.hpp"

namespace matmat {

namespace {

constexpr std::array<char, 8> kMagic{'M', 'A', 'T', 'M', 'A', 'T', 'v', '\0'};

template <typename UInt>
void put_uint(std::ostream& out, UInt value) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t k = 0; k < sizeof(UInt); ++k) bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

void put_double(std::ostream& out, double value) { put_uint(out, std::bit_cast<std::uint64_t>(value)); }

template <typename UInt>
UInt get_uint(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw IoError("model file truncated");
  UInt value = 0;
  for (std::size_t k = 0; k < sizeof(UInt); ++k) value |= static_cast<UInt>(bytes[k]) << (8 * k);
  return value;
}

double get_double(std::istream& in) { return std::bit_cast<double>(get_uint<std::uint64_t>(in)); }

struct Header {
  Algorithm algo;
  std::uint64_t n_users, n_items, t, d;
  double max_rating;
  ClampRange clamp;
};

void put_header(std::ostream& out, const Header& h) {
  out.write(kMagic.data(), kMagic.size());
  put_uint<std::uint32_t>(out, kModelFormatVersion);
  put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(h.algo));
  put_uint<std::uint64_t>(out, h.n_users);
  put_uint<std::uint64_t>(out, h.n_items);
  put_uint<std::uint64_t>(out, h.t);
  put_uint<std::uint64_t>(out, h.d);
  put_double(out, h.max_rating);
  put_double(out, h.clamp.lo);
  put_double(out, h.clamp.hi);
}

void put_values(std::ostream& out, std::span<const double> values) {
  for (double v : values) put_double(out, v);
}

void get_values(std::istream& in, std::span<double> values) {
  for (double& v : values) v = get_double(in);
}

}  // namespace

std::string_view to_string(Algorithm algo) { return algo == Algorithm::classic ? "classic" : "matmat"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "classic") return Algorithm::classic;
  if (name == "matmat") return Algorithm::matmat;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected classic or matmat)");
}

void write_model(std::ostream& out, const AnyModel& any) {
  if (const auto* m = std::get_if<MatMatModel>(&any)) {
    put_header(out, {Algorithm::matmat, m->n_users, m->n_items, m->t, m->d, m->max_rating, m->clamp});
    put_values(out, m->U.flat());
    put_values(out, m->V.flat());
  } else {
    const auto& c = std::get<ClassicModel>(any);
    put_header(out, {Algorithm::classic, c.n_users, c.n_items, 1, c.d, c.max_rating, c.clamp});
    put_values(out, c.P.flat());
    put_values(out, c.Q.flat());
  }
  if (!out) throw IoError("failed to write model");
}

AnyModel read_model(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("not a model file (bad magic)");
  const auto version = get_uint<std::uint32_t>(in);
  if (version != kModelFormatVersion) {
    throw IoError("unsupported model format version " + std::to_string(version));
  }
  const auto algo = get_uint<std::uint32_t>(in);
  Header h{};
  h.n_users = get_uint<std::uint64_t>(in);
  h.n_items = get_uint<std::uint64_t>(in);
  h.t = get_uint<std::uint64_t>(in);
  h.d = get_uint<std::uint64_t>(in);
  h.max_rating = get_double(in);
  h.clamp.lo = get_double(in);
  h.clamp.hi = get_double(in);

  constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
  if (h.n_users == 0 || h.n_items == 0 || h.t == 0 || h.d == 0 || h.n_users >= kLimit || h.n_items >= kLimit ||
      h.t > 1024 || h.d > 1024) {
    throw IoError("model header has implausible dimensions");
  }

  if (algo == static_cast<std::uint32_t>(Algorithm::matmat)) {
    MatMatModel m;
    m.n_users = h.n_users;
    m.n_items = h.n_items;
    m.t = h.t;
    m.d = h.d;
    m.max_rating = h.max_rating;
    m.clamp = h.clamp;
    m.U = BlockBank(m.n_users, m.t, m.d);
    m.V = BlockBank(m.n_items, m.d, m.t);
    get_values(in, m.U.flat());
    get_values(in, m.V.flat());
    return m;
  }
  if (algo == static_cast<std::uint32_t>(Algorithm::classic)) {
    if (h.t != 1) throw IoError("classic model must have t = 1");
    ClassicModel c;
    c.n_users = h.n_users;
    c.n_items = h.n_items;
    c.d = h.d;
    c.max_rating = h.max_rating;
    c.clamp = h.clamp;
    c.P = BlockBank(c.n_users, 1, c.d);
    c.Q = BlockBank(c.n_items, 1, c.d);
    get_values(in, c.P.flat());
    get_values(in, c.Q.flat());
    return c;
  }
  throw IoError("unknown algorithm tag " + std::to_string(algo));
}

void save_model(const std::filesystem::path& path, const AnyModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_model(out, model);
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace matmat
