#pragma once
// Test oracles and fixtures. Everything here is written from the definitions
// directly and shares no search or contraction code with the library.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tilepeps/tilepeps.hpp"

namespace tilepeps::testing {

// ---- machines ----

inline TuringMachine immediate_accept() {
  return {{"q0", "qF"}, {"#"}, "#", "q0", "qF", {{"q0", "#", "qF", "#", Move::stay}}};
}

inline TuringMachine eraser() {
  return {{"q0", "qF"},
          {"#", "1"},
          "#",
          "q0",
          "qF",
          {{"q0", "1", "q0", "#", Move::right}, {"q0", "#", "qF", "#", Move::stay}}};
}

/// Accepts by walking back over a blanked prefix; nondeterministic on '1'.
inline TuringMachine nd_two_state() {
  return {{"q0", "qF"},
          {"#", "0", "1"},
          "#",
          "q0",
          "qF",
          {{"q0", "1", "q0", "#", Move::right},
           {"q0", "1", "qF", "#", Move::stay},
           {"q0", "#", "qF", "#", Move::left},
           {"qF", "#", "qF", "#", Move::left},
           {"q0", "0", "q0", "0", Move::right}}};
}

/// Words over the non-blank symbols, every length up to max_len.
inline std::vector<std::vector<std::string>> all_words(const TuringMachine& tm, std::size_t max_len) {
  std::vector<std::string> letters;
  for (const auto& s : tm.alphabet)
    if (s != tm.blank) letters.push_back(s);
  std::vector<std::vector<std::string>> out{{}};
  std::vector<std::vector<std::string>> frontier{{}};
  for (std::size_t len = 1; len <= max_len && !letters.empty(); ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto& w : frontier)
      for (const auto& s : letters) {
        auto v = w;
        v.push_back(s);
        next.push_back(v);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

/// Breadth-first reachability over IDs of exactly `cells` cells: does the
/// strict accepting ID appear within max_steps steps?
inline bool naive_strict_accepts(const TuringMachine& tm, const std::vector<std::string>& word,
                                 std::size_t max_steps, std::size_t cells) {
  struct Id {
    std::vector<std::string> tape;
    long head;
    std::string state;
    bool operator<(const Id& o) const { return std::tie(tape, head, state) < std::tie(o.tape, o.head, o.state); }
  };
  Id start{std::vector<std::string>(cells, tm.blank), 0, tm.initial};
  for (std::size_t i = 0; i < word.size(); ++i) start.tape[i] = word[i];
  auto accepting = [&](const Id& id) {
    if (id.state != tm.accepting || id.head != 0) return false;
    for (const auto& s : id.tape)
      if (s != tm.blank) return false;
    return true;
  };
  std::set<Id> layer{start};
  for (std::size_t t = 0;; ++t) {
    for (const auto& id : layer)
      if (accepting(id)) return true;
    if (t == max_steps) return false;
    std::set<Id> next;
    for (const auto& id : layer)
      for (const auto& q : tm.program) {
        if (q.state != id.state || q.symbol != id.tape[static_cast<std::size_t>(id.head)]) continue;
        Id n = id;
        n.tape[static_cast<std::size_t>(n.head)] = q.write;
        n.state = q.next_state;
        n.head += q.move == Move::left ? -1 : q.move == Move::right ? 1 : 0;
        if (n.head < 0 || n.head >= static_cast<long>(cells)) continue;
        next.insert(n);
      }
    layer = std::move(next);
  }
}

// ---- tilings ----

inline bool fits(const BTInstance& inst, const std::vector<Tile>& p) {
  const std::size_t m = inst.rows, n = inst.cols;
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const Tile& t = p[r * n + c];
      if (r == 0 && t.down != inst.boundary.bottom[c]) return false;
      if (r + 1 == m && t.up != inst.boundary.top[c]) return false;
      if (c == 0 && t.left != inst.boundary.left[r]) return false;
      if (c + 1 == n && t.right != inst.boundary.right[r]) return false;
      if (r + 1 < m && t.up != p[(r + 1) * n + c].down) return false;
      if (c + 1 < n && t.right != p[r * n + c + 1].left) return false;
    }
  return true;
}

/// Odometer over all |T|^(m n) assignments.
inline std::uint64_t naive_count(const BTInstance& inst) {
  const auto& tiles = inst.tileset.tiles();
  const std::size_t cells = inst.rows * inst.cols;
  if (tiles.empty()) return 0;
  std::vector<std::size_t> digit(cells, 0);
  std::vector<Tile> p(cells, tiles[0]);
  std::uint64_t total = 0;
  while (true) {
    for (std::size_t i = 0; i < cells; ++i) p[i] = tiles[digit[i]];
    total += fits(inst, p);
    std::size_t i = 0;
    while (i < cells && ++digit[i] == tiles.size()) digit[i++] = 0;
    if (i == cells) return total;
  }
}

inline std::uint64_t naive_torus_count(const TileSet& ts, std::size_t lx, std::size_t ly) {
  const auto& tiles = ts.tiles();
  const std::size_t cells = lx * ly;
  if (tiles.empty()) return 0;
  std::vector<std::size_t> digit(cells, 0);
  std::uint64_t total = 0;
  while (true) {
    bool ok = true;
    for (std::size_t r = 0; r < ly && ok; ++r)
      for (std::size_t c = 0; c < lx && ok; ++c) {
        const Tile& t = tiles[digit[r * lx + c]];
        ok = t.right == tiles[digit[r * lx + (c + 1) % lx]].left && t.up == tiles[digit[((r + 1) % ly) * lx + c]].down;
      }
    total += ok;
    std::size_t i = 0;
    while (i < cells && ++digit[i] == tiles.size()) digit[i++] = 0;
    if (i == cells) return total;
  }
}

/// Minimum energy over assignments of tiles or a single "non-tile" symbol.
/// A non-tile plaquette pays every term it appears in whatever its colours,
/// so one representative covers all of them.
inline std::uint64_t naive_ground_energy(const BTInstance& inst) {
  const auto& tiles = inst.tileset.tiles();
  const std::size_t m = inst.rows, n = inst.cols, cells = m * n, k = tiles.size() + 1;
  std::vector<std::size_t> digit(cells, 0);
  std::uint64_t best = UINT64_MAX;
  while (true) {
    std::uint64_t e = 0;
    auto is_tile = [&](std::size_t i) { return digit[i] < tiles.size(); };
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t i = r * n + c;
        const bool ti = is_tile(i);
        const Tile t = ti ? tiles[digit[i]] : Tile{};
        if (r == 0) e += !(ti && t.down == inst.boundary.bottom[c]);
        if (r + 1 == m) e += !(ti && t.up == inst.boundary.top[c]);
        if (c == 0) e += !(ti && t.left == inst.boundary.left[r]);
        if (c + 1 == n) e += !(ti && t.right == inst.boundary.right[r]);
        if (c + 1 < n) e += !(ti && is_tile(i + 1) && t.right == tiles[digit[i + 1]].left);
        if (r + 1 < m) e += !(ti && is_tile(i + n) && t.up == tiles[digit[i + n]].down);
      }
    best = std::min(best, e);
    std::size_t i = 0;
    while (i < cells && ++digit[i] == k) digit[i++] = 0;
    if (i == cells) return best;
  }
}

// ---- random instances ----

inline std::vector<std::string> color_names(std::size_t g) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < g; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

inline TileSet random_tileset(std::mt19937_64& rng, std::size_t g, std::size_t max_tiles, std::vector<Tile> seed = {}) {
  std::uniform_int_distribution<Color> col(0, static_cast<Color>(g - 1));
  std::set<Tile> set(seed.begin(), seed.end());
  const std::size_t target = std::uniform_int_distribution<std::size_t>(set.size(), max_tiles)(rng);
  for (int tries = 0; set.size() < target && tries < 1000; ++tries) set.insert({col(rng), col(rng), col(rng), col(rng)});
  std::vector<Tile> tiles(set.begin(), set.end());
  std::shuffle(tiles.begin(), tiles.end(), rng);
  return TileSet(color_names(g), tiles);
}

/// Random instance: |Gamma| <= 3, |T| <= 6, up to 3x3. Planted instances
/// start from random link colours and contain the induced tiles, so they
/// are solvable by construction.
inline BTInstance random_instance(std::mt19937_64& rng, bool planted) {
  std::uniform_int_distribution<std::size_t> side(1, 3), gsize(1, 3);
  while (true) {
    BTInstance inst;
    inst.rows = side(rng);
    inst.cols = side(rng);
    const std::size_t g = gsize(rng), m = inst.rows, n = inst.cols;
    std::uniform_int_distribution<Color> col(0, static_cast<Color>(g - 1));
    if (planted) {
      std::vector<Color> h((n + 1) * m), v((m + 1) * n);  // h[r*(n+1)+c]: left link of (r,c); v[r*n+c]: bottom link
      for (auto& x : h) x = col(rng);
      for (auto& x : v) x = col(rng);
      std::set<Tile> induced;
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c)
          induced.insert({v[(r + 1) * n + c], v[r * n + c], h[r * (n + 1) + c], h[r * (n + 1) + c + 1]});
      if (induced.size() > 6) continue;
      inst.tileset = random_tileset(rng, g, 6, {induced.begin(), induced.end()});
      for (std::size_t c = 0; c < n; ++c) {
        inst.boundary.bottom.push_back(v[c]);
        inst.boundary.top.push_back(v[m * n + c]);
      }
      for (std::size_t r = 0; r < m; ++r) {
        inst.boundary.left.push_back(h[r * (n + 1)]);
        inst.boundary.right.push_back(h[r * (n + 1) + n]);
      }
    } else {
      inst.tileset = random_tileset(rng, g, 6);
      for (std::size_t c = 0; c < n; ++c) {
        inst.boundary.bottom.push_back(col(rng));
        inst.boundary.top.push_back(col(rng));
      }
      for (std::size_t r = 0; r < m; ++r) {
        inst.boundary.left.push_back(col(rng));
        inst.boundary.right.push_back(col(rng));
      }
    }
    return inst;
  }
}

/// Deterministic corpus, alternating planted and unconstrained instances.
inline std::vector<BTInstance> corpus(std::size_t size = 240, std::uint64_t seed = 20240611) {
  std::mt19937_64 rng(seed);
  std::vector<BTInstance> out;
  for (std::size_t i = 0; i < size; ++i) out.push_back(random_instance(rng, i % 2 == 0));
  return out;
}

inline BTInstance uniform_instance(const TileSet& ts, std::size_t rows, std::size_t cols, Color c) {
  BTInstance inst;
  inst.rows = rows;
  inst.cols = cols;
  inst.tileset = ts;
  inst.boundary = {std::vector<Color>(cols, c), std::vector<Color>(cols, c), std::vector<Color>(rows, c),
                   std::vector<Color>(rows, c)};
  return inst;
}

inline TileSet monochrome() { return TileSet({"a"}, {{0, 0, 0, 0}}); }
inline TileSet two_monochrome() { return TileSet({"a", "b"}, {{0, 0, 0, 0}, {1, 1, 1, 1}}); }
inline TileSet stripe() { return TileSet({"0", "1", "c"}, {{0, 1, 2, 2}, {1, 0, 2, 2}}); }

/// Random dense float tensor with all five legs.
inline Tensor<double> random_tensor(std::mt19937_64& rng, std::uint64_t vdim, std::uint64_t pdim,
                                    double zero_fraction = 0.3) {
  std::uniform_int_distribution<int> val(-3, 3);
  std::bernoulli_distribution zero(zero_fraction);
  std::vector<LegSpec> legs{{Leg::up, vdim}, {Leg::down, vdim}, {Leg::left, vdim}, {Leg::right, vdim}, {Leg::phys, pdim}};
  std::vector<double> v(vdim * vdim * vdim * vdim * pdim);
  for (auto& x : v) x = zero(rng) ? 0.0 : val(rng);
  return Tensor<double>::from_dense(legs, v);
}

}  // namespace tilepeps::testing
