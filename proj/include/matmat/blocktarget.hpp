#pragma once

// Lifting a scalar rating into a t x t target block. The diagonal carries
// the normalized rating; off-diagonal positions carry side channels.

#include <cstddef>
#include <string_view>
#include <vector>

#include "matmat/dataset.hpp"
#include "matmat/dense.hpp"

namespace matmat {

enum class SideChannel {
  item_popularity,  // item_rank / max_item_rank
  user_popularity,  // user_rank / max_user_rank
  constant_zero,
};

std::string_view to_string(SideChannel channel);

struct ChannelBinding {
  std::size_t row = 0;
  std::size_t col = 0;
  SideChannel channel = SideChannel::constant_zero;

  bool operator==(const ChannelBinding&) const = default;
};

struct BlockSpec {
  std::size_t t = 1;
  std::vector<ChannelBinding> channels;

  bool operator==(const BlockSpec&) const = default;
};

// Throws ConfigError when t == 0, a binding sits on the diagonal or outside
// the block, or two bindings share a position.
void validate(const BlockSpec& spec);

// t = 2, item popularity at (0, 1), user popularity at (1, 0).
BlockSpec popularity_spec();
// t = 1, no channels: the classic scalar target.
BlockSpec scalar_spec();
// scalar_spec() for t = 1, otherwise the popularity bindings of
// popularity_spec() with every other off-diagonal left unbound (zero).
BlockSpec popularity_spec(std::size_t t);

struct BlockTarget {
  Matrix values;

  std::size_t t() const noexcept { return values.rows(); }
};

double channel_value(SideChannel channel, UserIndex u, ItemIndex i, const PopularityTable& pop);

// Diagonal = r / table.max_rating; bound off-diagonals = channel value;
// unbound off-diagonals = 0. Throws RangeError for invalid indices and
// ValidationError for r <= 0.
BlockTarget build_target(const BlockSpec& spec, UserIndex u, ItemIndex i, double r,
                         const InteractionTable& table, const PopularityTable& pop);

}  // namespace matmat
