#pragma once
// Classical commuting Hamiltonian of a bounded tiling instance. Every term is
// diagonal in the colour product basis, so energies are evaluated on basis
// configurations and terms are only materialized on demand.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "tilepeps/errors.hpp"
#include "tilepeps/tiling.hpp"

namespace tilepeps {

enum class Orientation { horizontal, vertical };
enum class Side { top, bottom, left, right };

/// Four colours per plaquette, row-major, row 0 at the bottom.
struct PlaquetteConfig {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Tile> plaquettes;

  const Tile& at(std::size_t r, std::size_t c) const { return plaquettes[r * cols + c]; }
};

/// Horizontal pairs are (left, right) and match left.right == right.left;
/// vertical pairs are (lower, upper) and match lower.up == upper.down.
inline int bulk_term_energy(const TileSet& ts, const Tile& first, const Tile& second, Orientation o) {
  if (!ts.contains(first) || !ts.contains(second)) return 1;
  const bool match = o == Orientation::horizontal ? first.right == second.left : first.up == second.down;
  return match ? 0 : 1;
}

inline Color facing_color(const Tile& t, Side side) {
  switch (side) {
    case Side::top: return t.up;
    case Side::bottom: return t.down;
    case Side::left: return t.left;
    case Side::right: return t.right;
  }
  return t.up;
}

inline int boundary_term_energy(const TileSet& ts, Side side, Color gamma, const Tile& c) {
  return ts.contains(c) && facing_color(c, side) == gamma ? 0 : 1;
}

inline std::uint64_t total_energy(const BTInstance& inst, const PlaquetteConfig& cfg) {
  inst.validate();
  if (cfg.rows != inst.rows || cfg.cols != inst.cols || cfg.plaquettes.size() != inst.rows * inst.cols)
    throw InvalidInput("configuration shape does not match the instance");
  const TileSet& ts = inst.tileset;
  for (const Tile& t : cfg.plaquettes)
    if (std::max({t.up, t.down, t.left, t.right}) >= ts.num_colors()) throw InvalidInput("colour out of range");
  std::uint64_t e = 0;
  for (std::size_t r = 0; r < inst.rows; ++r) {
    for (std::size_t c = 0; c < inst.cols; ++c) {
      const Tile& p = cfg.at(r, c);
      if (c + 1 < inst.cols) e += bulk_term_energy(ts, p, cfg.at(r, c + 1), Orientation::horizontal);
      if (r + 1 < inst.rows) e += bulk_term_energy(ts, p, cfg.at(r + 1, c), Orientation::vertical);
      if (r == 0) e += boundary_term_energy(ts, Side::bottom, inst.boundary.bottom[c], p);
      if (r + 1 == inst.rows) e += boundary_term_energy(ts, Side::top, inst.boundary.top[c], p);
      if (c == 0) e += boundary_term_energy(ts, Side::left, inst.boundary.left[r], p);
      if (c + 1 == inst.cols) e += boundary_term_energy(ts, Side::right, inst.boundary.right[r], p);
    }
  }
  return e;
}

inline PlaquetteConfig config_from_tiling(const BTInstance& inst, const Tiling& t) {
  PlaquetteConfig cfg{inst.rows, inst.cols, {}};
  for (std::size_t i : t.tiles) cfg.plaquettes.push_back(inst.tileset.tiles().at(i));
  return cfg;
}

/// The tiling whose plaquettes spell `cfg`, when every plaquette is a tile.
inline std::optional<Tiling> tiling_from_config(const BTInstance& inst, const PlaquetteConfig& cfg) {
  Tiling t{cfg.rows, cfg.cols, {}};
  const auto& tiles = inst.tileset.tiles();
  for (const Tile& p : cfg.plaquettes) {
    auto it = std::find(tiles.begin(), tiles.end(), p);
    if (it == tiles.end()) return std::nullopt;
    t.tiles.push_back(static_cast<std::size_t>(it - tiles.begin()));
  }
  return t;
}

/// Exact minimum of total_energy. A plaquette outside T pays every one of its
/// terms, and swapping it for any tile cannot raise the energy, so the
/// minimum is taken over tile assignments by a row-profile sweep whose state
/// is the up colour per column plus the right colour of the last plaquette.
inline std::uint64_t ground_energy(const BTInstance& inst, std::size_t max_cells = 12) {
  inst.validate();
  const std::size_t m = inst.rows, n = inst.cols;
  if (m * n > max_cells)
    throw BudgetExceeded("ground energy needs " + std::to_string(m * n) + " plaquettes, budget is " +
                         std::to_string(max_cells));
  const auto& tiles = inst.tileset.tiles();
  if (tiles.empty()) return (m - 1) * n + m * (n - 1) + 2 * (m + n);

  const std::uint64_t g = inst.tileset.num_colors();
  double key_bits = 0;
  for (std::size_t i = 0; i <= n; ++i) key_bits += std::log2(static_cast<double>(g));
  if (key_bits >= 63) throw BudgetExceeded("profile key does not fit in 64 bits");

  // key = frontier[0..n) then left colour, base g
  auto digit = [g](std::uint64_t key, std::size_t pos, std::size_t width) {
    for (std::size_t i = pos + 1; i < width; ++i) key /= g;
    return key % g;
  };
  std::vector<std::uint64_t> pow(n + 2, 1);
  for (std::size_t i = 1; i < pow.size(); ++i) pow[i] = pow[i - 1] * g;

  std::unordered_map<std::uint64_t, std::uint64_t> layer{{0, 0}};
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      std::unordered_map<std::uint64_t, std::uint64_t> next;
      for (const auto& [key, energy] : layer) {
        const std::uint64_t below = digit(key, c, n + 1);
        const std::uint64_t left = digit(key, n, n + 1);
        for (const Tile& t : tiles) {
          std::uint64_t cost = 0;
          cost += r == 0 ? t.down != inst.boundary.bottom[c] : t.down != below;
          cost += c == 0 ? t.left != inst.boundary.left[r] : t.left != left;
          if (c + 1 == n) cost += t.right != inst.boundary.right[r];
          if (r + 1 == m) cost += t.up != inst.boundary.top[c];
          std::uint64_t k = key - below * pow[n - c] + std::uint64_t{t.up} * pow[n - c];
          k = k - left + t.right;
          auto [it, inserted] = next.try_emplace(k, energy + cost);
          if (!inserted) it->second = std::min(it->second, energy + cost);
        }
      }
      layer = std::move(next);
    }
  }
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (const auto& [_, e] : layer) best = std::min(best, e);
  return best;
}

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

enum class ClhAnswer { yes, no };

/// YES when the ground energy is at most beta, NO when it is at least alpha.
/// The spectrum is integral, so with alpha = 2/3, beta = 1/3 the promise
/// always holds.
inline ClhAnswer clh_decide(const BTInstance& inst, Rational alpha = {2, 3}, Rational beta = {1, 3},
                            std::size_t max_cells = 12) {
  if (alpha.den <= 0 || beta.den <= 0) throw InvalidInput("thresholds need positive denominators");
  const auto e = static_cast<std::int64_t>(ground_energy(inst, max_cells));
  if (e * beta.den <= beta.num) return ClhAnswer::yes;
  if (e * alpha.den >= alpha.num) return ClhAnswer::no;
  throw InvalidInput("ground energy falls inside the promise gap");
}

/// Basis index of a plaquette state: lexicographic over (u, d, l, r).
inline std::uint64_t plaquette_index(const Tile& t, std::uint64_t g) {
  return ((std::uint64_t{t.up} * g + t.down) * g + t.left) * g + t.right;
}

inline Tile plaquette_from_index(std::uint64_t s, std::uint64_t g) {
  Tile t;
  t.right = static_cast<Color>(s % g);
  s /= g;
  t.left = static_cast<Color>(s % g);
  s /= g;
  t.down = static_cast<Color>(s % g);
  t.up = static_cast<Color>(s / g);
  return t;
}

/// 1 - sum over matching tile pairs of |w,w'><w,w'| on (Gamma^4)^(x)2, pair
/// ordered as in bulk_term_energy.
inline Eigen::SparseMatrix<double> materialize_bulk_term(const TileSet& ts, Orientation o) {
  const std::uint64_t g = ts.num_colors();
  const std::uint64_t d = g * g * g * g;
  const std::uint64_t dim = d * d;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(dim);
  for (std::uint64_t i = 0; i < dim; ++i) entries.emplace_back(i, i, 1.0);
  for (const Tile& a : ts.tiles())
    for (const Tile& b : ts.tiles()) {
      const bool match = o == Orientation::horizontal ? a.right == b.left : a.up == b.down;
      if (!match) continue;
      const std::uint64_t k = plaquette_index(a, g) * d + plaquette_index(b, g);
      entries.emplace_back(k, k, -1.0);
    }
  Eigen::SparseMatrix<double> h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.setFromTriplets(entries.begin(), entries.end());
  h.prune(0.0);
  return h;
}

/// 1 - sum over tiles with the side colour gamma of |w><w|.
inline Eigen::SparseMatrix<double> materialize_boundary_term(const TileSet& ts, Side side, Color gamma) {
  const std::uint64_t g = ts.num_colors();
  const std::uint64_t d = g * g * g * g;
  std::vector<Eigen::Triplet<double>> entries;
  for (std::uint64_t i = 0; i < d; ++i) entries.emplace_back(i, i, 1.0);
  for (const Tile& t : ts.tiles())
    if (facing_color(t, side) == gamma) {
      const auto k = plaquette_index(t, g);
      entries.emplace_back(k, k, -1.0);
    }
  Eigen::SparseMatrix<double> h(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  h.setFromTriplets(entries.begin(), entries.end());
  h.prune(0.0);
  return h;
}

inline bool is_diagonal(const Eigen::SparseMatrix<double>& m) {
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) return false;
  return true;
}

}  // namespace tilepeps
