#include "matmat/blocktarget.hpp"

#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "matmat/errors.hpp"

namespace matmat {

std::string_view to_string(SideChannel channel) {
  switch (channel) {
    case SideChannel::item_popularity: return "item_popularity";
    case SideChannel::user_popularity: return "user_popularity";
    case SideChannel::constant_zero: return "constant_zero";
  }
  return "unknown";
}

void validate(const BlockSpec& spec) {
  if (spec.t == 0) throw ConfigError("block side length must be at least 1");
  std::set<std::pair<std::size_t, std::size_t>> used;
  for (const auto& b : spec.channels) {
    if (b.row >= spec.t || b.col >= spec.t) {
      throw ConfigError("channel binding (" + std::to_string(b.row) + "," + std::to_string(b.col) +
                        ") outside a " + std::to_string(spec.t) + "x" + std::to_string(spec.t) + " block");
    }
    if (b.row == b.col) {
      throw ConfigError("channel binding on diagonal position " + std::to_string(b.row));
    }
    if (!used.emplace(b.row, b.col).second) {
      throw ConfigError("two channel bindings share position (" + std::to_string(b.row) + "," +
                        std::to_string(b.col) + ")");
    }
  }
}

BlockSpec popularity_spec() {
  return BlockSpec{2,
                   {{0, 1, SideChannel::item_popularity}, {1, 0, SideChannel::user_popularity}}};
}

BlockSpec scalar_spec() { return BlockSpec{1, {}}; }

BlockSpec popularity_spec(std::size_t t) {
  if (t == 0) throw ConfigError("block side length must be at least 1");
  if (t == 1) return scalar_spec();
  BlockSpec spec = popularity_spec();
  spec.t = t;
  return spec;
}

double channel_value(SideChannel channel, UserIndex u, ItemIndex i, const PopularityTable& pop) {
  switch (channel) {
    case SideChannel::item_popularity:
      if (i >= pop.item_rank.size()) throw RangeError("item index " + std::to_string(i) + " out of range");
      return static_cast<double>(pop.item_rank[i]) / static_cast<double>(pop.max_item_rank);
    case SideChannel::user_popularity:
      if (u >= pop.user_rank.size()) throw RangeError("user index " + std::to_string(u) + " out of range");
      return static_cast<double>(pop.user_rank[u]) / static_cast<double>(pop.max_user_rank);
    case SideChannel::constant_zero:
      return 0.0;
  }
  return 0.0;
}

BlockTarget build_target(const BlockSpec& spec, UserIndex u, ItemIndex i, double r,
                         const InteractionTable& table, const PopularityTable& pop) {
  if (u >= table.n_users) throw RangeError("user index " + std::to_string(u) + " out of range");
  if (i >= table.n_items) throw RangeError("item index " + std::to_string(i) + " out of range");
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("rating must be finite and positive");

  BlockTarget target{Matrix(spec.t, spec.t, 0.0)};
  const double diag = r / table.max_rating;
  for (std::size_t k = 0; k < spec.t; ++k) target.values(k, k) = diag;
  for (const auto& b : spec.channels) target.values(b.row, b.col) = channel_value(b.channel, u, i, pop);
  return target;
}

}  // namespace matmat
