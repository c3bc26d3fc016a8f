#pragma once

// Rating ingestion: MovieLens-style CSV parsing, dense reindexing,
// popularity ranks and seeded train/test splits.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace matmat {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;

struct RatingRecord {
  std::int64_t user_ext = 0;
  std::int64_t item_ext = 0;
  double rating = 0.0;
  std::int64_t timestamp = 0;

  bool operator==(const RatingRecord&) const = default;
};

struct Triple {
  UserIndex user = 0;
  ItemIndex item = 0;
  double rating = 0.0;

  bool operator==(const Triple&) const = default;
};

// Bijection between external ids and dense indices [0, n). Dense indices
// follow ascending external id.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::int64_t> sorted_unique_ids);

  std::size_t size() const noexcept { return external_.size(); }
  std::int64_t external(std::uint32_t dense) const;
  // Throws RangeError for unknown ids.
  std::uint32_t dense(std::int64_t external) const;
  bool contains(std::int64_t external) const;
  std::span<const std::int64_t> externals() const noexcept { return external_; }

 private:
  std::vector<std::int64_t> external_;
};

struct InteractionTable {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  // Sorted by (user, item); no duplicate pairs.
  std::vector<Triple> triples;
  double max_rating = 0.0;
  IdMap user_map;
  IdMap item_map;
};

// Rank 1 is the least-rated user (item); rank n the most-rated.
struct PopularityTable {
  std::vector<std::uint32_t> user_rank;
  std::vector<std::uint32_t> item_rank;
  std::uint32_t max_user_rank = 0;
  std::uint32_t max_item_rank = 0;
};

// Indices into InteractionTable::triples, each list ascending.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
};

// Header `userId,movieId,rating,timestamp` is optional; the timestamp column
// may be omitted. Blank lines are ignored; CRLF endings are accepted.
std::vector<RatingRecord> load_ratings(const std::filesystem::path& path);
std::vector<RatingRecord> parse_ratings(std::string_view text);

// Duplicate (user, item) pairs keep the record with the largest timestamp;
// equal timestamps keep the later record.
InteractionTable build_interactions(std::span<const RatingRecord> records);

PopularityTable compute_popularity(const InteractionTable& table);

Split split(const InteractionTable& table, double test_fraction, std::uint64_t seed);

// true for users (items) that occur in at least one training triple.
std::vector<bool> users_in_train(const InteractionTable& table, const Split& split);
std::vector<bool> items_in_train(const InteractionTable& table, const Split& split);

}  // namespace matmat
