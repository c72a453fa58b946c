#pragma once
// PEPS tensors with labelled legs, the tile-set PEPS, direct-sum and
// tensor-product combinators, and exact double-layer contraction.
//
// Tensors keep only their nonzero entries (sorted by row-major flat index):
// a tile tensor over |Gamma| colours has |Gamma|^8 dense entries but at most
// |T| nonzeros. Entries are exact integers (BigInt) for tiling-derived PEPS
// and doubles for general ones; a grid never mixes the two.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tilepeps/errors.hpp"
#include "tilepeps/tiling.hpp"

namespace tilepeps {

enum class Leg : std::uint8_t { up, down, left, right, phys };

inline const char* leg_name(Leg l) {
  switch (l) {
    case Leg::up: return "up";
    case Leg::down: return "down";
    case Leg::left: return "left";
    case Leg::right: return "right";
    case Leg::phys: return "phys";
  }
  return "?";
}

inline Leg leg_from_name(const std::string& s) {
  for (Leg l : {Leg::up, Leg::down, Leg::left, Leg::right, Leg::phys})
    if (s == leg_name(l)) return l;
  throw InvalidInput("unknown leg label '" + s + "'");
}

inline constexpr Leg kVirtualLegs[] = {Leg::up, Leg::down, Leg::left, Leg::right};

struct LegSpec {
  Leg label;
  std::uint64_t dim;
  friend bool operator==(const LegSpec&, const LegSpec&) = default;
};

template <class Scalar>
class Tensor {
 public:
  using Entry = std::pair<std::uint64_t, Scalar>;

  Tensor() = default;

  /// Duplicate flat indices are summed; zeros are dropped.
  Tensor(std::vector<LegSpec> legs, std::vector<Entry> entries) : legs_(std::move(legs)) {
    for (std::size_t i = 0; i < legs_.size(); ++i) {
      if (legs_[i].dim == 0) throw InvalidInput("leg dimensions must be positive");
      for (std::size_t j = i + 1; j < legs_.size(); ++j)
        if (legs_[i].label == legs_[j].label) throw InvalidInput("duplicate leg label");
    }
    size_ = 1;
    for (const auto& l : legs_) {
      if (size_ > (std::uint64_t{1} << 62) / l.dim) throw BudgetExceeded("tensor index space exceeds 2^62");
      size_ *= l.dim;
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (auto& e : entries) {
      if (e.first >= size_) throw InvalidInput("tensor entry index out of range");
      if (!entries_.empty() && entries_.back().first == e.first)
        entries_.back().second += e.second;
      else
        entries_.push_back(std::move(e));
    }
    std::erase_if(entries_, [](const Entry& e) { return e.second == Scalar(0); });
  }

  static Tensor from_dense(std::vector<LegSpec> legs, const std::vector<Scalar>& values) {
    std::vector<Entry> entries;
    for (std::uint64_t i = 0; i < values.size(); ++i)
      if (values[i] != Scalar(0)) entries.emplace_back(i, values[i]);
    Tensor t(std::move(legs), std::move(entries));
    if (values.size() != t.size()) throw InvalidInput("dense entry count does not match leg dimensions");
    return t;
  }

  const std::vector<LegSpec>& legs() const noexcept { return legs_; }
  const std::vector<Entry>& nonzeros() const noexcept { return entries_; }
  std::uint64_t size() const noexcept { return size_; }

  std::optional<std::size_t> position(Leg l) const {
    for (std::size_t i = 0; i < legs_.size(); ++i)
      if (legs_[i].label == l) return i;
    return std::nullopt;
  }
  bool has(Leg l) const { return position(l).has_value(); }
  /// Absent legs behave as dimension 1.
  std::uint64_t dim(Leg l) const {
    auto p = position(l);
    return p ? legs_[*p].dim : 1;
  }

  std::vector<std::uint64_t> unflatten(std::uint64_t flat) const {
    std::vector<std::uint64_t> idx(legs_.size());
    for (std::size_t i = legs_.size(); i-- > 0;) {
      idx[i] = flat % legs_[i].dim;
      flat /= legs_[i].dim;
    }
    return idx;
  }
  std::uint64_t flatten(const std::vector<std::uint64_t>& idx) const {
    std::uint64_t flat = 0;
    for (std::size_t i = 0; i < legs_.size(); ++i) flat = flat * legs_[i].dim + idx[i];
    return flat;
  }

  Scalar at(const std::vector<std::uint64_t>& idx) const {
    const auto flat = flatten(idx);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), flat,
                               [](const Entry& e, std::uint64_t f) { return e.first < f; });
    return it != entries_.end() && it->first == flat ? it->second : Scalar(0);
  }

  std::vector<Scalar> dense() const {
    if (size_ > (std::uint64_t{1} << 26)) throw BudgetExceeded("tensor too large for a dense view");
    std::vector<Scalar> out(size_, Scalar(0));
    for (const auto& [i, v] : entries_) out[i] = v;
    return out;
  }

  /// Same entries under renamed legs.
  Tensor relabeled(const std::map<Leg, Leg>& rename) const {
    Tensor t = *this;
    for (auto& l : t.legs_)
      if (auto it = rename.find(l.label); it != rename.end()) l.label = it->second;
    for (std::size_t i = 0; i < t.legs_.size(); ++i)
      for (std::size_t j = i + 1; j < t.legs_.size(); ++j)
        if (t.legs_[i].label == t.legs_[j].label) throw InvalidInput("relabeling merges two legs");
    return t;
  }

  /// Entries reordered to the given leg order (same label set).
  Tensor permuted(const std::vector<Leg>& order) const {
    if (order.size() != legs_.size()) throw InvalidInput("leg label sets differ");
    std::vector<std::size_t> src(order.size());
    std::vector<LegSpec> legs;
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto p = position(order[i]);
      if (!p) throw InvalidInput(std::string("leg label sets differ at '") + leg_name(order[i]) + "'");
      src[i] = *p;
      legs.push_back(legs_[*p]);
    }
    std::vector<Entry> entries;
    entries.reserve(entries_.size());
    for (const auto& [flat, v] : entries_) {
      const auto idx = unflatten(flat);
      std::uint64_t f = 0;
      for (std::size_t i = 0; i < order.size(); ++i) f = f * legs[i].dim + idx[src[i]];
      entries.emplace_back(f, v);
    }
    return Tensor(std::move(legs), std::move(entries));
  }

  double max_abs() const {
    double m = 0;
    for (const auto& [_, v] : entries_) m = std::max(m, std::abs(to_double(v)));
    return m;
  }

  Tensor<double> to_float() const {
    std::vector<std::pair<std::uint64_t, double>> e;
    for (const auto& [i, v] : entries_) e.emplace_back(i, to_double(v));
    return Tensor<double>(legs_, std::move(e));
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

  static double to_double(const Scalar& v) {
    if constexpr (std::is_same_v<Scalar, double>)
      return v;
    else
      return v.template convert_to<double>();
  }

 private:
  std::vector<LegSpec> legs_;
  std::vector<Entry> entries_;
  std::uint64_t size_ = 1;
};

/// Tile tensor with some virtual legs pinned to fixed colours and removed.
/// Entry (w)(s) is 1 iff w is a tile, agrees with the pinned colours, and
/// s encodes w lexicographically over (u, d, l, r).
template <class Scalar = BigInt>
Tensor<Scalar> boundary_tensor(const TileSet& ts, const std::map<Leg, Color>& fixed) {
  for (const auto& [leg, color] : fixed) {
    if (leg == Leg::phys) throw InvalidInput("only virtual legs can be pinned");
    if (color >= ts.num_colors()) throw InvalidInput("pinned colour outside the colour set");
  }
  const std::uint64_t g = ts.num_colors();
  std::vector<LegSpec> legs;
  for (Leg l : kVirtualLegs)
    if (!fixed.contains(l)) legs.push_back({l, g});
  legs.push_back({Leg::phys, g * g * g * g});

  std::vector<std::pair<std::uint64_t, Scalar>> entries;
  for (const Tile& t : ts.tiles()) {
    const Color colors[4] = {t.up, t.down, t.left, t.right};
    bool ok = true;
    std::uint64_t flat = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      if (auto it = fixed.find(kVirtualLegs[k]); it != fixed.end()) {
        ok = ok && it->second == colors[k];
      } else {
        flat = flat * g + colors[k];
      }
    }
    if (!ok) continue;
    const std::uint64_t s = ((std::uint64_t{t.up} * g + t.down) * g + t.left) * g + t.right;
    entries.emplace_back(flat * g * g * g * g + s, Scalar(1));
  }
  return Tensor<Scalar>(std::move(legs), std::move(entries));
}

/// Bulk tile tensor: sum over w' in T of delta(w,w') delta(w,s).
template <class Scalar = BigInt>
Tensor<Scalar> bulk_tensor(const TileSet& ts) {
  return boundary_tensor<Scalar>(ts, {});
}

template <class Scalar>
Tensor<Scalar> direct_sum(const Tensor<Scalar>& a, const Tensor<Scalar>& b_in) {
  std::vector<Leg> order;
  for (const auto& l : a.legs()) order.push_back(l.label);
  const Tensor<Scalar> b = b_in.permuted(order);
  std::vector<LegSpec> legs;
  for (std::size_t i = 0; i < order.size(); ++i) legs.push_back({order[i], a.legs()[i].dim + b.legs()[i].dim});
  std::vector<std::pair<std::uint64_t, Scalar>> entries;
  auto place = [&](const Tensor<Scalar>& t, bool second) {
    for (const auto& [flat, v] : t.nonzeros()) {
      auto idx = t.unflatten(flat);
      std::uint64_t f = 0;
      for (std::size_t i = 0; i < idx.size(); ++i) f = f * legs[i].dim + idx[i] + (second ? a.legs()[i].dim : 0);
      entries.emplace_back(f, v);
    }
  };
  place(a, false);
  place(b, true);
  return Tensor<Scalar>(std::move(legs), std::move(entries));
}

/// Kronecker product leg by leg; the first factor's index is the major one.
template <class Scalar>
Tensor<Scalar> tensor_product(const Tensor<Scalar>& a, const Tensor<Scalar>& b_in) {
  std::vector<Leg> order;
  for (const auto& l : a.legs()) order.push_back(l.label);
  const Tensor<Scalar> b = b_in.permuted(order);
  std::vector<LegSpec> legs;
  for (std::size_t i = 0; i < order.size(); ++i) legs.push_back({order[i], a.legs()[i].dim * b.legs()[i].dim});
  std::vector<std::pair<std::uint64_t, Scalar>> entries;
  for (const auto& [fa, va] : a.nonzeros()) {
    const auto ia = a.unflatten(fa);
    for (const auto& [fb, vb] : b.nonzeros()) {
      const auto ib = b.unflatten(fb);
      std::uint64_t f = 0;
      for (std::size_t i = 0; i < ia.size(); ++i) f = f * legs[i].dim + ia[i] * b.legs()[i].dim + ib[i];
      entries.emplace_back(f, va * vb);
    }
  }
  return Tensor<Scalar>(std::move(legs), std::move(entries));
}

/// m x n tensors, row-major with row 0 at the bottom. Open grids omit the
/// outward legs; periodic grids keep all four and wrap around.
template <class Scalar>
struct PepsGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool periodic = false;
  std::vector<Tensor<Scalar>> sites;

  const Tensor<Scalar>& at(std::size_t r, std::size_t c) const { return sites[r * cols + c]; }

  void validate() const {
    if (rows == 0 || cols == 0 || sites.size() != rows * cols) throw InvalidInput("grid shape mismatch");
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        const auto& t = at(r, c);
        if (!t.has(Leg::phys)) throw InvalidInput("every site needs a physical leg");
        const bool up = periodic || r + 1 < rows, down = periodic || r > 0;
        const bool left = periodic || c > 0, right = periodic || c + 1 < cols;
        if (t.has(Leg::up) != up || t.has(Leg::down) != down || t.has(Leg::left) != left ||
            t.has(Leg::right) != right)
          throw InvalidInput("site (" + std::to_string(r) + "," + std::to_string(c) +
                             ") legs do not match its lattice position");
        if ((periodic || c + 1 < cols) && t.dim(Leg::right) != at(r, (c + 1) % cols).dim(Leg::left))
          throw InvalidInput("horizontal bond dimensions disagree");
        if ((periodic || r + 1 < rows) && t.dim(Leg::up) != at((r + 1) % rows, c).dim(Leg::down))
          throw InvalidInput("vertical bond dimensions disagree");
      }
  }

  /// Transposed lattice: site (r,c) moves to (c,r) with up<->right and
  /// down<->left, so rows of the result are columns of this grid.
  PepsGrid transposed() const {
    PepsGrid t{cols, rows, periodic, {}};
    const std::map<Leg, Leg> rename{{Leg::up, Leg::right}, {Leg::right, Leg::up}, {Leg::down, Leg::left},
                                    {Leg::left, Leg::down}};
    for (std::size_t r = 0; r < cols; ++r)
      for (std::size_t c = 0; c < rows; ++c) t.sites.push_back(at(c, r).relabeled(rename));
    return t;
  }
};

/// PEPS of a bounded tiling instance: bulk tensors inside, boundary legs
/// pinned to the instance's boundary colours.
inline PepsGrid<BigInt> assemble_peps(const BTInstance& inst) {
  inst.validate();
  PepsGrid<BigInt> grid{inst.rows, inst.cols, false, {}};
  for (std::size_t r = 0; r < inst.rows; ++r)
    for (std::size_t c = 0; c < inst.cols; ++c) {
      std::map<Leg, Color> fixed;
      if (r == 0) fixed[Leg::down] = inst.boundary.bottom[c];
      if (r + 1 == inst.rows) fixed[Leg::up] = inst.boundary.top[c];
      if (c == 0) fixed[Leg::left] = inst.boundary.left[r];
      if (c + 1 == inst.cols) fixed[Leg::right] = inst.boundary.right[r];
      grid.sites.push_back(boundary_tensor<BigInt>(inst.tileset, fixed));
    }
  return grid;
}

/// Periodic PEPS of the bulk tile tensor on an lx x ly torus.
inline PepsGrid<BigInt> torus_peps(const TileSet& ts, std::size_t lx, std::size_t ly) {
  if (lx == 0 || ly == 0) throw InvalidInput("torus periods must be positive");
  PepsGrid<BigInt> grid{ly, lx, true, {}};
  const auto a = bulk_tensor<BigInt>(ts);
  grid.sites.assign(lx * ly, a);
  return grid;
}

enum class ContractionOrder { rows, columns };

namespace detail {

// Double-layer site operator sum_s A(s) (x) A(s)*, with each virtual leg
// doubled to dimension D^2 (index a*D + a'). Absent legs have index 0.
template <class Scalar>
struct DoubledSite {
  struct Entry {
    std::uint64_t up, down, left, right;
    Scalar value;
  };
  // Entries keyed by (down, left) for the zipper sweep.
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<Entry>> by_down_left;
};

template <class Scalar>
DoubledSite<Scalar> double_layer(const Tensor<Scalar>& t) {
  const auto phys = *t.position(Leg::phys);
  std::map<std::uint64_t, std::vector<std::pair<std::vector<std::uint64_t>, Scalar>>> by_phys;
  for (const auto& [flat, v] : t.nonzeros()) {
    auto idx = t.unflatten(flat);
    const auto s = idx[phys];
    std::vector<std::uint64_t> virt(4, 0);
    for (std::size_t k = 0; k < 4; ++k)
      if (auto p = t.position(kVirtualLegs[k])) virt[k] = idx[*p];
    by_phys[s].emplace_back(std::move(virt), v);
  }
  std::map<std::array<std::uint64_t, 4>, Scalar> merged;
  for (const auto& [_, group] : by_phys)
    for (const auto& [x, vx] : group)
      for (const auto& [y, vy] : group) {
        std::array<std::uint64_t, 4> key{};
        for (std::size_t k = 0; k < 4; ++k) key[k] = x[k] * t.dim(kVirtualLegs[k]) + y[k];
        merged[key] += vx * vy;  // real entries: conjugation is the identity
      }
  DoubledSite<Scalar> out;
  for (const auto& [k, v] : merged)
    if (v != Scalar(0)) out.by_down_left[{k[1], k[2]}].push_back({k[0], k[1], k[2], k[3], v});
  return out;
}

// Row-by-row zipper over the doubled lattice. The sparse boundary state maps
// (free bottom indices of row 0 [periodic only], current vertical indices,
// horizontal index, first horizontal index of the row [periodic only]) to an
// amplitude. Open grids have index 0 on every absent leg.
template <class Scalar>
Scalar contract_rows(const PepsGrid<Scalar>& grid, std::size_t max_states) {
  grid.validate();
  const std::size_t m = grid.rows, n = grid.cols;
  std::vector<DoubledSite<Scalar>> sites;
  for (const auto& t : grid.sites) sites.push_back(double_layer(t));

  using Key = std::vector<std::uint64_t>;  // [start(n) | current(n) | h | h0]
  const std::size_t H = 2 * n, H0 = 2 * n + 1;
  std::map<Key, Scalar> state{{Key(2 * n + 2, 0), Scalar(1)}};
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto& site = sites[r * n + c];
      std::map<Key, Scalar> next;
      for (const auto& [key, amp] : state) {
        const bool free_down = grid.periodic && r == 0;
        const bool free_left = grid.periodic && c == 0;
        for (const auto& [dl, entries] : site.by_down_left) {
          if (!free_down && dl.first != key[n + c]) continue;
          if (!free_left && dl.second != key[H]) continue;
          for (const auto& e : entries) {
            Key k = key;
            if (free_down) k[c] = e.down;
            if (free_left) k[H0] = e.left;
            k[n + c] = e.up;
            k[H] = e.right;
            next[k] += amp * e.value;
          }
        }
      }
      std::erase_if(next, [](const auto& kv) { return kv.second == Scalar(0); });
      if (next.size() > max_states)
        throw BudgetExceeded("boundary state has " + std::to_string(next.size()) + " entries, budget is " +
                             std::to_string(max_states));
      state = std::move(next);
    }
    // close the row: the last right index must meet the first left index
    std::map<Key, Scalar> closed;
    for (const auto& [key, amp] : state) {
      if (key[H] != key[H0]) continue;
      Key k = key;
      k[H] = k[H0] = 0;
      closed[k] += amp;
    }
    state = std::move(closed);
  }
  Scalar total(0);
  for (const auto& [key, amp] : state) {
    if (!std::equal(key.begin(), key.begin() + n, key.begin() + n)) continue;  // wrap rows
    total += amp;
  }
  return total;
}

}  // namespace detail

/// Physical amplitudes of an open grid, keyed by the per-site physical
/// indices in row-major order. Zero amplitudes are omitted.
template <class Scalar>
std::map<std::vector<std::uint64_t>, Scalar> state_amplitudes(const PepsGrid<Scalar>& grid,
                                                              std::size_t max_terms = 1 << 20) {
  grid.validate();
  if (grid.periodic) throw InvalidInput("amplitudes are only defined for open grids");
  const std::size_t n = grid.cols;
  // key: [vertical(n) | h | phys...]
  using Key = std::vector<std::uint64_t>;
  std::map<Key, Scalar> state{{Key(n + 1, 0), Scalar(1)}};
  for (std::size_t r = 0; r < grid.rows; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const auto& t = grid.at(r, c);
      std::map<Key, Scalar> next;
      for (const auto& [flat, v] : t.nonzeros()) {
        const auto idx = t.unflatten(flat);
        auto get = [&](Leg l) -> std::uint64_t {
          auto p = t.position(l);
          return p ? idx[*p] : 0;
        };
        for (const auto& [key, amp] : state) {
          if (key[c] != get(Leg::down) || key[n] != get(Leg::left)) continue;
          Key k = key;
          k[c] = get(Leg::up);
          k[n] = c + 1 == n ? 0 : get(Leg::right);
          k.push_back(get(Leg::phys));
          next[k] += amp * v;
        }
      }
      if (next.size() > max_terms) throw BudgetExceeded("too many nonzero amplitudes");
      state = std::move(next);
    }
  std::map<Key, Scalar> out;
  for (const auto& [key, amp] : state)
    if (amp != Scalar(0)) out[Key(key.begin() + n + 1, key.end())] += amp;
  return out;
}

/// <Phi|Phi> by exact double-layer boundary contraction. For a tiling PEPS
/// in integer mode this is the number of valid tilings.
template <class Scalar>
Scalar norm_squared(const PepsGrid<Scalar>& grid, std::size_t max_row_states = 4096,
                    ContractionOrder order = ContractionOrder::rows) {
  if (order == ContractionOrder::columns) return detail::contract_rows(grid.transposed(), max_row_states);
  return detail::contract_rows(grid, max_row_states);
}

/// Float-mode threshold: 1e-20 times the product over sites of max|entry|^2.
/// A norm at or below it counts as zero.
template <class Scalar>
double zero_threshold(const PepsGrid<Scalar>& grid, double rel_tol = 1e-20) {
  double bound = 1.0;
  for (const auto& t : grid.sites) bound *= t.max_abs() * t.max_abs();
  return rel_tol * bound;
}

template <class Scalar>
bool is_zero_norm(const PepsGrid<Scalar>& grid, const Scalar& norm2, double rel_tol) {
  if constexpr (std::is_same_v<Scalar, double>)
    return norm2 <= zero_threshold(grid, rel_tol);
  else
    return norm2 == 0;
}

/// True iff the open-boundary PEPS is the zero vector.
template <class Scalar>
bool zero_test_open(const PepsGrid<Scalar>& grid, std::size_t max_row_states = 4096, double rel_tol = 1e-20) {
  return is_zero_norm(grid, norm_squared(grid, max_row_states), rel_tol);
}

/// True iff the bulk tile tensor patched around the lx x ly torus gives the
/// zero vector, i.e. no tiling with periods (lx, ly) exists. Sweeps along
/// the shorter period.
inline bool zero_test_torus(const TileSet& ts, std::size_t lx, std::size_t ly, std::size_t max_row_states = 4096) {
  const auto order = lx > ly ? ContractionOrder::columns : ContractionOrder::rows;
  return norm_squared(torus_peps(ts, lx, ly), max_row_states, order) == 0;
}

}  // namespace tilepeps
