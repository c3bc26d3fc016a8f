#pragma once

// Binary model files. Layout (all integers and doubles little-endian):
//
//   offset  size  field
//   0       8     magic "MATMATv\0"
//   8       4     format version (1)
//   12      4     algorithm: 0 = classic, 1 = matmat
//   16      8     n_users
//   24      8     n_items
//   32      8     t (1 for classic)
//   40      8     d
//   48      8     max_rating (IEEE-754 binary64)
//   56      8     clamp lo
//   64      8     clamp hi
//   72      ...   user factors: n_users blocks of t x d, row-major, index order
//   ...     ...   item factors: n_items blocks of d x t, row-major, index order
//
// A classic model stores p_u as a 1 x d block and q_i as a d x 1 block, so
// its entries appear in the same order as a t = 1 MatMat model.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "matmat/factorization.hpp"

namespace matmat {

inline constexpr std::uint32_t kModelFormatVersion = 1;

enum class Algorithm : std::uint32_t { classic = 0, matmat = 1 };

std::string_view to_string(Algorithm algo);
// Throws ConfigError for anything but "classic" or "matmat".
Algorithm parse_algorithm(std::string_view name);

using AnyModel = std::variant<ClassicModel, MatMatModel>;

void write_model(std::ostream& out, const AnyModel& model);
AnyModel read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const AnyModel& model);
AnyModel load_model(const std::filesystem::path& path);

}  // namespace matmat
