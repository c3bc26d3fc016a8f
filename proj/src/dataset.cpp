#include "matmat/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "matmat/errors.hpp"

namespace matmat {

IdMap::IdMap(std::vector<std::int64_t> sorted_unique_ids) : external_(std::move(sorted_unique_ids)) {}

std::int64_t IdMap::external(std::uint32_t dense) const {
  if (dense >= external_.size()) throw RangeError("dense index " + std::to_string(dense) + " out of range");
  return external_[dense];
}

std::uint32_t IdMap::dense(std::int64_t external) const {
  auto it = std::lower_bound(external_.begin(), external_.end(), external);
  if (it == external_.end() || *it != external) {
    throw RangeError("unknown external id " + std::to_string(external));
  }
  return static_cast<std::uint32_t>(it - external_.begin());
}

bool IdMap::contains(std::int64_t external) const {
  return std::binary_search(external_.begin(), external_.end(), external);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::vector<RatingRecord> parse_ratings(std::string_view text) {
  std::vector<RatingRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool first_content_line = true;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;

    line = trim(line);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) continue;

    auto fields = split_fields(line);
    if (first_content_line) {
      first_content_line = false;
      std::int64_t probe = 0;
      if (!parse_number(fields[0], probe)) continue;  // header
    }
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError(line_no, "expected 3 or 4 comma-separated fields, got " + std::to_string(fields.size()));
    }

    RatingRecord rec;
    if (!parse_number(fields[0], rec.user_ext)) throw ParseError(line_no, "bad user id");
    if (!parse_number(fields[1], rec.item_ext)) throw ParseError(line_no, "bad item id");
    if (!parse_number(fields[2], rec.rating)) throw ParseError(line_no, "bad rating");
    if (fields.size() == 4 && !parse_number(fields[3], rec.timestamp)) {
      throw ParseError(line_no, "bad timestamp");
    }
    if (rec.user_ext < 0 || rec.item_ext < 0) {
      throw ValidationError("line " + std::to_string(line_no) + ": negative id");
    }
    if (!std::isfinite(rec.rating) || rec.rating <= 0.0) {
      throw ValidationError("line " + std::to_string(line_no) + ": rating must be finite and positive");
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<RatingRecord> load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot read ratings file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IngestError("error while reading " + path.string());
  return parse_ratings(buf.str());
}

InteractionTable build_interactions(std::span<const RatingRecord> records) {
  if (records.empty()) throw ValidationError("no interactions");

  std::vector<std::int64_t> users, items;
  users.reserve(records.size());
  items.reserve(records.size());
  for (const auto& r : records) {
    users.push_back(r.user_ext);
    items.push_back(r.item_ext);
  }
  auto unique_sorted = [](std::vector<std::int64_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  unique_sorted(users);
  unique_sorted(items);

  InteractionTable table;
  table.user_map = IdMap(std::move(users));
  table.item_map = IdMap(std::move(items));
  table.n_users = table.user_map.size();
  table.n_items = table.item_map.size();

  // Stable sort by pair then timestamp: the last record of each pair group is
  // the latest, and among equal timestamps the last occurrence in the input.
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::pair<UserIndex, ItemIndex>> dense(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    dense[k] = {table.user_map.dense(records[k].user_ext), table.item_map.dense(records[k].item_ext)};
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dense[a] != dense[b]) return dense[a] < dense[b];
    return records[a].timestamp < records[b].timestamp;
  });

  table.triples.reserve(records.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    bool last_of_group = k + 1 == order.size() || dense[order[k + 1]] != dense[order[k]];
    if (!last_of_group) continue;
    const auto& rec = records[order[k]];
    table.triples.push_back({dense[order[k]].first, dense[order[k]].second, rec.rating});
    table.max_rating = std::max(table.max_rating, rec.rating);
  }
  return table;
}

namespace {

std::vector<std::uint32_t> rank_by_count(const std::vector<std::size_t>& counts) {
  // Dense index order equals external id order, so index is the id tie-break.
  std::vector<std::uint32_t> order(counts.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return counts[a] < counts[b]; });
  std::vector<std::uint32_t> rank(counts.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = static_cast<std::uint32_t>(pos + 1);
  return rank;
}

}  // namespace

PopularityTable compute_popularity(const InteractionTable& table) {
  std::vector<std::size_t> user_counts(table.n_users, 0), item_counts(table.n_items, 0);
  for (const auto& t : table.triples) {
    ++user_counts.at(t.user);
    ++item_counts.at(t.item);
  }
  PopularityTable pop;
  pop.user_rank = rank_by_count(user_counts);
  pop.item_rank = rank_by_count(item_counts);
  pop.max_user_rank = static_cast<std::uint32_t>(table.n_users);
  pop.max_item_rank = static_cast<std::uint32_t>(table.n_items);
  return pop;
}

Split split(const InteractionTable& table, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  const std::size_t total = table.triples.size();
  std::vector<std::size_t> perm(total);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  // Explicit Fisher-Yates over raw engine output keeps the partition identical
  // across standard library implementations.
  std::mt19937_64 rng(seed);
  for (std::size_t k = total; k > 1; --k) {
    std::size_t j = static_cast<std::size_t>(rng() % k);
    std::swap(perm[k - 1], perm[j]);
  }

  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(total)));
  n_test = std::min(n_test, total);

  Split s;
  s.test_fraction = test_fraction;
  s.seed = seed;
  s.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

std::vector<bool> users_in_train(const InteractionTable& table, const Split& split) {
  std::vector<bool> seen(table.n_users, false);
  for (auto idx : split.train) seen[table.triples[idx].user] = true;
  return seen;
}

std::vector<bool> items_in_train(const InteractionTable& table, const Split& split) {
  std::vector<bool> seen(table.n_items, false);
  for (auto idx : split.train) seen[table.triples[idx].item] = true;
  return seen;
}

}  // namespace matmat
