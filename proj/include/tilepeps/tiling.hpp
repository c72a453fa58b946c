#pragma once
// Bounded tiling instances, a backtracking solver/counter used as the
// trusted oracle for every other stage, and periodic (torus) counting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tilepeps/errors.hpp"

namespace tilepeps {

using BigInt = boost::multiprecision::cpp_int;
using Color = std::uint32_t;

/// Four colours around a plaquette, ordered (up, down, left, right).
struct Tile {
  Color up = 0;
  Color down = 0;
  Color left = 0;
  Color right = 0;

  friend auto operator<=>(const Tile&, const Tile&) = default;
};

/// Ordered colour set plus an ordered, duplicate-free tile list.
class TileSet {
 public:
  TileSet() = default;

  TileSet(std::vector<std::string> colors, std::vector<Tile> tiles)
      : colors_(std::move(colors)), tiles_(std::move(tiles)) {
    for (std::size_t i = 0; i < colors_.size(); ++i)
      for (std::size_t j = i + 1; j < colors_.size(); ++j)
        if (colors_[i] == colors_[j]) throw InvalidInput("duplicate colour '" + colors_[i] + "'");
    std::vector<Tile> sorted = tiles_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InvalidInput("duplicate tile");
    for (const Tile& t : tiles_)
      if (t.up >= colors_.size() || t.down >= colors_.size() || t.left >= colors_.size() || t.right >= colors_.size())
        throw InvalidInput("tile colour outside the colour set");
  }

  const std::vector<std::string>& colors() const noexcept { return colors_; }
  const std::vector<Tile>& tiles() const noexcept { return tiles_; }
  std::size_t num_colors() const noexcept { return colors_.size(); }
  std::size_t size() const noexcept { return tiles_.size(); }

  std::optional<Color> color_index(const std::string& name) const {
    for (std::size_t i = 0; i < colors_.size(); ++i)
      if (colors_[i] == name) return static_cast<Color>(i);
    return std::nullopt;
  }

  bool contains(const Tile& t) const { return std::find(tiles_.begin(), tiles_.end(), t) != tiles_.end(); }

  /// Swaps (up,left) and (down,right) on every tile; maps a torus tiling to
  /// its reflection through the anti-diagonal.
  TileSet transposed() const {
    std::vector<Tile> t;
    t.reserve(tiles_.size());
    for (const Tile& x : tiles_) t.push_back({x.left, x.right, x.up, x.down});
    return TileSet(colors_, std::move(t));
  }

 private:
  std::vector<std::string> colors_;
  std::vector<Tile> tiles_;
};

/// Fixed colours on the lattice boundary. top/bottom are indexed by column,
/// left/right by row; row 0 is the bottom row.
struct Boundary {
  std::vector<Color> top;
  std::vector<Color> bottom;
  std::vector<Color> left;
  std::vector<Color> right;
};

struct BTInstance {
  std::size_t rows = 0;
  std::size_t cols = 0;
  TileSet tileset;
  Boundary boundary;

  void validate() const {
    if (rows == 0 || cols == 0) throw InvalidInput("lattice dimensions must be positive");
    if (boundary.top.size() != cols || boundary.bottom.size() != cols || boundary.left.size() != rows ||
        boundary.right.size() != rows)
      throw InvalidInput("boundary must fix every one of the 2(rows+cols) boundary links");
    auto check = [&](const std::vector<Color>& v) {
      for (Color c : v)
        if (c >= tileset.num_colors()) throw InvalidInput("boundary colour outside the colour set");
    };
    check(boundary.top);
    check(boundary.bottom);
    check(boundary.left);
    check(boundary.right);
  }
};

/// Row-major tile indices, row 0 at the bottom.
struct Tiling {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> tiles;

  std::size_t at(std::size_t r, std::size_t c) const { return tiles[r * cols + c]; }
  friend bool operator==(const Tiling&, const Tiling&) = default;
};

namespace detail {

// Candidate tiles keyed by (down colour, left colour), in tile-index order.
class TileIndex {
 public:
  explicit TileIndex(const TileSet& ts) : ncolors_(ts.num_colors()) {
    by_down_left_.resize(ncolors_ * ncolors_);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const Tile& t = ts.tiles()[i];
      by_down_left_[t.down * ncolors_ + t.left].push_back(i);
    }
  }
  const std::vector<std::size_t>& candidates(Color down, Color left) const {
    return by_down_left_[down * ncolors_ + left];
  }

 private:
  std::size_t ncolors_;
  std::vector<std::vector<std::size_t>> by_down_left_;
};

class Backtracker {
 public:
  Backtracker(const BTInstance& inst, std::uint64_t max_nodes)
      : inst_(inst), index_(inst.tileset), max_nodes_(max_nodes), placed_(inst.rows * inst.cols) {}

  std::vector<std::size_t> candidates_at(std::size_t pos) const {
    const std::size_t r = pos / inst_.cols, c = pos % inst_.cols;
    const auto& tiles = inst_.tileset.tiles();
    const Color down = r == 0 ? inst_.boundary.bottom[c] : tiles[placed_[pos - inst_.cols]].up;
    const Color left = c == 0 ? inst_.boundary.left[r] : tiles[placed_[pos - 1]].right;
    std::vector<std::size_t> out;
    for (std::size_t i : index_.candidates(down, left)) {
      const Tile& t = tiles[i];
      if (c + 1 == inst_.cols && t.right != inst_.boundary.right[r]) continue;
      if (r + 1 == inst_.rows && t.up != inst_.boundary.top[c]) continue;
      out.push_back(i);
    }
    return out;
  }

  bool find_from(std::size_t pos) {
    if (pos == placed_.size()) return true;
    for (std::size_t i : candidates_at(pos)) {
      tick();
      placed_[pos] = i;
      if (find_from(pos + 1)) return true;
    }
    return false;
  }

  BigInt count_from(std::size_t pos) {
    if (pos == placed_.size()) return 1;
    BigInt total = 0;
    for (std::size_t i : candidates_at(pos)) {
      tick();
      placed_[pos] = i;
      total += count_from(pos + 1);
    }
    return total;
  }

  void place(std::size_t pos, std::size_t tile) { placed_[pos] = tile; }
  const std::vector<std::size_t>& placed() const { return placed_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  void tick() {
    if (++nodes_ > max_nodes_) throw BudgetExceeded("tiling search exceeded " + std::to_string(max_nodes_) + " nodes");
  }

  const BTInstance& inst_;
  TileIndex index_;
  std::uint64_t max_nodes_;
  std::uint64_t nodes_ = 0;
  std::vector<std::size_t> placed_;
};

}  // namespace detail

/// First valid tiling in row-major, tile-index order, if any exists.
inline std::optional<Tiling> solve(const BTInstance& inst, std::uint64_t max_nodes = 50'000'000) {
  inst.validate();
  detail::Backtracker bt(inst, max_nodes);
  if (!bt.find_from(0)) return std::nullopt;
  return Tiling{inst.rows, inst.cols, bt.placed()};
}

/// Exact number of valid tilings. With threads > 1 the first plaquette's
/// candidates are explored concurrently; the sum is reduced in candidate
/// order so the result and the budget verdict do not depend on scheduling.
inline BigInt count(const BTInstance& inst, std::uint64_t max_nodes = 50'000'000, unsigned threads = 1) {
  inst.validate();
  detail::Backtracker root(inst, max_nodes);
  const auto first = root.candidates_at(0);
  if (threads <= 1 || first.size() <= 1) return root.count_from(0);

  struct Partial {
    BigInt count;
    std::uint64_t nodes = 0;
    bool exceeded = false;
  };
  auto run = [&inst, max_nodes](std::size_t tile) {
    Partial p;
    detail::Backtracker bt(inst, max_nodes);
    bt.place(0, tile);
    try {
      p.count = bt.count_from(1);
    } catch (const BudgetExceeded&) {
      p.exceeded = true;
    }
    p.nodes = bt.nodes();
    return p;
  };
  std::vector<Partial> partials(first.size());
  for (std::size_t start = 0; start < first.size(); start += threads) {
    std::vector<std::future<Partial>> batch;
    for (std::size_t k = start; k < std::min(first.size(), start + threads); ++k)
      batch.push_back(std::async(std::launch::async, run, first[k]));
    for (std::size_t k = 0; k < batch.size(); ++k) partials[start + k] = batch[k].get();
  }
  BigInt total = 0;
  std::uint64_t nodes = first.size();
  for (const Partial& p : partials) {
    nodes += p.nodes;
    if (p.exceeded || nodes > max_nodes)
      throw BudgetExceeded("tiling search exceeded " + std::to_string(max_nodes) + " nodes");
    total += p.count;
  }
  return total;
}

inline bool validate_tiling(const BTInstance& inst, const Tiling& t) {
  if (t.rows != inst.rows || t.cols != inst.cols || t.tiles.size() != inst.rows * inst.cols)
    throw InvalidInput("tiling shape does not match the instance");
  const auto& tiles = inst.tileset.tiles();
  for (std::size_t i : t.tiles)
    if (i >= tiles.size()) throw InvalidInput("tile index out of range");
  for (std::size_t r = 0; r < inst.rows; ++r) {
    for (std::size_t c = 0; c < inst.cols; ++c) {
      const Tile& x = tiles[t.at(r, c)];
      if (r == 0 && x.down != inst.boundary.bottom[c]) return false;
      if (r + 1 == inst.rows && x.up != inst.boundary.top[c]) return false;
      if (c == 0 && x.left != inst.boundary.left[r]) return false;
      if (c + 1 == inst.cols && x.right != inst.boundary.right[r]) return false;
      if (r + 1 < inst.rows && x.up != tiles[t.at(r + 1, c)].down) return false;
      if (c + 1 < inst.cols && x.right != tiles[t.at(r, c + 1)].left) return false;
    }
  }
  return true;
}

/// Number of valid tilings of the lx-by-ly torus, as trace(M^ly) where M maps
/// the bottom colours of a cyclic row to its top colours with multiplicity.
inline BigInt torus_count(const TileSet& ts, std::size_t lx, std::size_t ly, unsigned threads = 1,
                          std::uint64_t max_nodes = 50'000'000) {
  if (lx == 0 || ly == 0) throw InvalidInput("torus periods must be positive");
  const auto& tiles = ts.tiles();
  const std::uint64_t base = std::max<std::uint64_t>(ts.num_colors(), 1);
  if (static_cast<double>(lx) * std::log2(static_cast<double>(base)) >= 63.0)
    throw BudgetExceeded("torus row key does not fit in 64 bits");

  // Enumerate cyclic rows: row[c].right == row[c+1 mod lx].left.
  using Key = std::uint64_t;
  std::map<Key, std::map<Key, BigInt>> transfer;
  std::vector<std::size_t> row(lx);
  std::uint64_t nodes = 0;
  auto encode = [&](bool top) {
    Key k = 0;
    for (std::size_t c = 0; c < lx; ++c) k = k * base + (top ? tiles[row[c]].up : tiles[row[c]].down);
    return k;
  };
  auto extend = [&](auto&& self, std::size_t c) -> void {
    if (c == lx) {
      if (tiles[row[lx - 1]].right != tiles[row[0]].left) return;
      transfer[encode(false)][encode(true)] += 1;
      return;
    }
    for (std::size_t i = 0; i < tiles.size(); ++i) {
      if (c > 0 && tiles[row[c - 1]].right != tiles[i].left) continue;
      if (++nodes > max_nodes) throw BudgetExceeded("torus row enumeration exceeded node budget");
      row[c] = i;
      self(self, c + 1);
    }
  };
  extend(extend, 0);

  std::vector<Key> starts;
  for (const auto& [k, _] : transfer) starts.push_back(k);

  auto closed_walks = [&](Key start) {
    std::map<Key, BigInt> v{{start, 1}};
    for (std::size_t step = 0; step < ly; ++step) {
      std::map<Key, BigInt> next;
      for (const auto& [k, a] : v) {
        auto it = transfer.find(k);
        if (it == transfer.end()) continue;
        for (const auto& [to, m] : it->second) next[to] += a * m;
      }
      v = std::move(next);
    }
    auto it = v.find(start);
    return it == v.end() ? BigInt(0) : it->second;
  };

  std::vector<BigInt> partial(starts.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) partial[i] = closed_walks(starts[i]);
  } else {
    for (std::size_t s = 0; s < starts.size(); s += threads) {
      std::vector<std::future<BigInt>> batch;
      for (std::size_t k = s; k < std::min(starts.size(), s + threads); ++k)
        batch.push_back(std::async(std::launch::async, closed_walks, starts[k]));
      for (std::size_t k = 0; k < batch.size(); ++k) partial[s + k] = batch[k].get();
    }
  }
  BigInt total = 0;
  for (const BigInt& p : partial) total += p;
  return total;
}

}  // namespace tilepeps
