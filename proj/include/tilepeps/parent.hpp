#pragma once
// Parent Hamiltonians: the region map chi(A, R), canonical projector terms,
// subspace comparisons, and the composed-tensor gap term.
//
// Physical spaces of regions are ordered by cell (first cell most
// significant). Operators on them are stored as an explicit Hermitian block
// on a support index set plus a scalar multiple of the identity everywhere
// else, since tile-set pair spaces are large but their images are tiny.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "tilepeps/errors.hpp"
#include "tilepeps/hamiltonian.hpp"
#include "tilepeps/tensor.hpp"

namespace tilepeps {

struct Cell {
  long row = 0;  // increases upwards
  long col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline Cell neighbor(const Cell& c, Leg l) {
  switch (l) {
    case Leg::up: return {c.row + 1, c.col};
    case Leg::down: return {c.row - 1, c.col};
    case Leg::left: return {c.row, c.col - 1};
    case Leg::right: return {c.row, c.col + 1};
    default: throw InvalidInput("physical leg has no neighbour");
  }
}

inline Leg opposite(Leg l) {
  switch (l) {
    case Leg::up: return Leg::down;
    case Leg::down: return Leg::up;
    case Leg::left: return Leg::right;
    case Leg::right: return Leg::left;
    default: throw InvalidInput("physical leg has no opposite");
  }
}

class Region {
 public:
  struct BoundaryLeg {
    std::size_t cell;
    Leg leg;
  };

  explicit Region(std::vector<Cell> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    if (cells_.empty()) throw InvalidInput("region is empty");
    if (std::adjacent_find(cells_.begin(), cells_.end()) != cells_.end()) throw InvalidInput("region repeats a cell");
    std::set<Cell> seen{cells_.front()};
    std::vector<Cell> stack{cells_.front()};
    while (!stack.empty()) {
      const Cell c = stack.back();
      stack.pop_back();
      for (Leg l : kVirtualLegs) {
        const Cell nb = neighbor(c, l);
        if (contains(nb) && seen.insert(nb).second) stack.push_back(nb);
      }
    }
    if (seen.size() != cells_.size()) throw InvalidInput("region is not connected");
  }

  static Region horizontal_pair() { return Region({{0, 0}, {0, 1}}); }
  static Region vertical_pair() { return Region({{0, 0}, {1, 0}}); }
  static Region pair(Orientation o) { return o == Orientation::horizontal ? horizontal_pair() : vertical_pair(); }

  const std::vector<Cell>& cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return cells_.size(); }
  bool contains(const Cell& c) const { return std::binary_search(cells_.begin(), cells_.end(), c); }
  std::size_t index_of(const Cell& c) const {
    return static_cast<std::size_t>(std::lower_bound(cells_.begin(), cells_.end(), c) - cells_.begin());
  }

  /// Legs leaving the region, by cell then up/down/left/right.
  std::vector<BoundaryLeg> boundary_legs() const {
    std::vector<BoundaryLeg> out;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      for (Leg l : kVirtualLegs)
        if (!contains(neighbor(cells_[i], l))) out.push_back({i, l});
    return out;
  }

 private:
  std::vector<Cell> cells_;
};

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t base, std::size_t exp, std::uint64_t limit, const char* what) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && v > limit / base) throw BudgetExceeded(std::string(what) + " dimension exceeds budget");
    v *= base;
  }
  return v;
}

}  // namespace detail

/// d^|R| x D^|dR| matrix; column C holds the region state with the boundary
/// legs fixed to C. A must carry all four virtual legs and a physical leg.
inline Eigen::SparseMatrix<double> chi_matrix(const Tensor<double>& a, const Region& region,
                                              std::uint64_t max_dim = std::uint64_t{1} << 40) {
  for (Leg l : {Leg::up, Leg::down, Leg::left, Leg::right, Leg::phys})
    if (!a.has(l)) throw InvalidInput(std::string("chi needs a tensor with a '") + leg_name(l) + "' leg");
  if (a.dim(Leg::up) != a.dim(Leg::down) || a.dim(Leg::left) != a.dim(Leg::right))
    throw InvalidInput("opposite virtual legs must have equal dimensions to tile a region");
  const auto legs = region.boundary_legs();
  const std::size_t k = region.size();
  const std::uint64_t d = a.dim(Leg::phys);
  const std::uint64_t rows = detail::checked_pow(d, k, max_dim, "physical");
  std::uint64_t cols = 1;
  for (const auto& b : legs) {
    if (cols > max_dim / a.dim(b.leg)) throw BudgetExceeded("boundary dimension exceeds budget");
    cols *= a.dim(b.leg);
  }
  if (rows > std::uint64_t{std::numeric_limits<int>::max()} || cols > std::uint64_t{std::numeric_limits<int>::max()})
    throw BudgetExceeded("chi matrix does not fit a sparse matrix index");

  // nonzeros as [up, down, left, right, phys]
  struct Entry {
    std::uint64_t v[5];
    double value;
  };
  std::vector<Entry> entries;
  const Leg order[5] = {Leg::up, Leg::down, Leg::left, Leg::right, Leg::phys};
  for (const auto& [flat, value] : a.nonzeros()) {
    const auto idx = a.unflatten(flat);
    Entry e{};
    for (std::size_t i = 0; i < 5; ++i) e.v[i] = idx[*a.position(order[i])];
    e.value = value;
    entries.push_back(e);
  }

  // neighbours already placed when cell i is chosen
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> earlier(k);  // (leg slot, other cell)
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t s = 0; s < 4; ++s) {
      const Cell nb = neighbor(region.cells()[i], order[s]);
      if (region.contains(nb) && region.index_of(nb) < i) earlier[i].emplace_back(s, region.index_of(nb));
    }
  auto slot_of = [](Leg l) { return static_cast<std::size_t>(l); };

  std::unordered_map<std::uint64_t, double> acc;
  std::vector<const Entry*> chosen(k);
  auto place = [&](auto&& self, std::size_t i, double value) -> void {
    if (i == k) {
      std::uint64_t row = 0, col = 0;
      for (std::size_t c = 0; c < k; ++c) row = row * d + chosen[c]->v[4];
      for (const auto& b : legs) col = col * a.dim(b.leg) + chosen[b.cell]->v[slot_of(b.leg)];
      acc[row * cols + col] += value;
      if (acc.size() > (std::size_t{1} << 26)) throw BudgetExceeded("chi matrix has too many nonzeros");
      return;
    }
    for (const auto& e : entries) {
      bool ok = true;
      for (const auto& [s, other] : earlier[i])
        ok = ok && e.v[s] == chosen[other]->v[slot_of(opposite(order[s]))];
      if (!ok) continue;
      chosen[i] = &e;
      self(self, i + 1, value * e.value);
    }
  };
  place(place, 0, 1.0);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(acc.size());
  for (const auto& [key, v] : acc)
    if (v != 0.0) triplets.emplace_back(static_cast<int>(key / cols), static_cast<int>(key % cols), v);
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

/// Orthonormal basis of a subspace of a `dim`-dimensional space whose
/// vectors vanish outside `support` (sorted). basis is |support| x rank.
struct Subspace {
  std::uint64_t dim = 0;
  std::vector<std::uint64_t> support;
  Eigen::MatrixXd basis;

  std::size_t rank() const { return static_cast<std::size_t>(basis.cols()); }
};

namespace detail {

inline std::vector<std::uint64_t> merge_support(const std::vector<std::uint64_t>& a,
                                                const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> u;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return u;
}

inline std::vector<std::size_t> positions_in(const std::vector<std::uint64_t>& sub,
                                             const std::vector<std::uint64_t>& super) {
  std::vector<std::size_t> pos;
  for (auto x : sub)
    pos.push_back(static_cast<std::size_t>(std::lower_bound(super.begin(), super.end(), x) - super.begin()));
  return pos;
}

inline Eigen::MatrixXd embed(const Subspace& s, const std::vector<std::uint64_t>& u) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(u.size()), s.basis.cols());
  const auto pos = positions_in(s.support, u);
  for (std::size_t i = 0; i < pos.size(); ++i) out.row(static_cast<Eigen::Index>(pos[i])) = s.basis.row(i);
  return out;
}

}  // namespace detail

/// Column space of m. Singular values at most tol times the largest one
/// count as zero.
inline Subspace image_basis(const Eigen::SparseMatrix<double>& m, double tol = 1e-10) {
  Subspace s;
  s.dim = static_cast<std::uint64_t>(m.rows());
  std::set<Eigen::Index> rows, cols;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      if (!std::isfinite(it.value())) throw InvalidInput("matrix has non-finite entries");
      if (it.value() != 0.0) {
        rows.insert(it.row());
        cols.insert(it.col());
      }
    }
  s.support.assign(rows.begin(), rows.end());
  if (rows.empty()) {
    s.basis = Eigen::MatrixXd(0, 0);
    return s;
  }
  if (rows.size() * cols.size() > (std::size_t{1} << 26)) throw BudgetExceeded("image computation too large");
  std::unordered_map<Eigen::Index, Eigen::Index> rpos, cpos;
  for (auto r : rows) rpos.emplace(r, static_cast<Eigen::Index>(rpos.size()));
  for (auto c : cols) cpos.emplace(c, static_cast<Eigen::Index>(cpos.size()));
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      if (it.value() != 0.0) dense(rpos.at(it.row()), cpos.at(it.col())) = it.value();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol * sv(0)) ++rank;
  s.basis = svd.matrixU().leftCols(rank);
  return s;
}

/// Every vector of b lies in a, up to residual tol.
inline bool contains(const Subspace& a, const Subspace& b, double tol = 1e-10) {
  if (a.dim != b.dim) throw InvalidInput("subspaces live in different spaces");
  if (b.rank() == 0) return true;
  const auto u = detail::merge_support(a.support, b.support);
  const Eigen::MatrixXd qa = detail::embed(a, u), qb = detail::embed(b, u);
  const Eigen::MatrixXd residual = qb - qa * (qa.transpose() * qb);
  return residual.cwiseAbs().maxCoeff() <= tol;
}

inline bool same_subspace(const Subspace& a, const Subspace& b, double tol = 1e-10) {
  return a.rank() == b.rank() && contains(a, b, tol) && contains(b, a, tol);
}

/// Hermitian operator equal to `block` on the `support` indices and to
/// identity_weight times the identity on all other indices.
struct OperatorMatrix {
  std::uint64_t dim = 0;
  std::vector<std::uint64_t> support;  // sorted
  Eigen::MatrixXd block;
  double identity_weight = 0.0;

  static OperatorMatrix dense(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw InvalidInput("operator matrix must be square");
    OperatorMatrix op{static_cast<std::uint64_t>(m.rows()), {}, m, 0.0};
    op.support.resize(static_cast<std::size_t>(m.rows()));
    std::iota(op.support.begin(), op.support.end(), std::uint64_t{0});
    return op;
  }

  static OperatorMatrix identity(std::uint64_t dim) { return {dim, {}, Eigen::MatrixXd(0, 0), 1.0}; }
  static OperatorMatrix zero(std::uint64_t dim) { return {dim, {}, Eigen::MatrixXd(0, 0), 0.0}; }

  /// Support = indices whose row or column differs from weight * identity.
  static OperatorMatrix from_sparse(const Eigen::SparseMatrix<double>& m, double weight) {
    if (m.rows() != m.cols()) throw InvalidInput("operator matrix must be square");
    std::vector<double> diag(static_cast<std::size_t>(m.rows()), 0.0);
    std::set<std::uint64_t> sup;
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
        if (it.row() == it.col())
          diag[static_cast<std::size_t>(it.row())] += it.value();
        else if (it.value() != 0.0) {
          sup.insert(static_cast<std::uint64_t>(it.row()));
          sup.insert(static_cast<std::uint64_t>(it.col()));
        }
      }
    for (std::size_t i = 0; i < diag.size(); ++i)
      if (diag[i] != weight) sup.insert(i);
    OperatorMatrix op{static_cast<std::uint64_t>(m.rows()), {sup.begin(), sup.end()}, {}, weight};
    if (op.support.size() > 8192) throw BudgetExceeded("operator support too large");
    const auto n = static_cast<Eigen::Index>(op.support.size());
    op.block = Eigen::MatrixXd::Zero(n, n);
    std::unordered_map<std::uint64_t, Eigen::Index> pos;
    for (Eigen::Index i = 0; i < n; ++i) pos.emplace(op.support[static_cast<std::size_t>(i)], i);
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
        auto r = pos.find(static_cast<std::uint64_t>(it.row()));
        auto c = pos.find(static_cast<std::uint64_t>(it.col()));
        if (r != pos.end() && c != pos.end()) op.block(r->second, c->second) += it.value();
      }
    return op;
  }

  void validate() const {
    if (!std::is_sorted(support.begin(), support.end()) ||
        std::adjacent_find(support.begin(), support.end()) != support.end())
      throw InvalidInput("operator support must be strictly increasing");
    if (!support.empty() && support.back() >= dim) throw InvalidInput("operator support outside the space");
    if (block.rows() != static_cast<Eigen::Index>(support.size()) || block.cols() != block.rows())
      throw InvalidInput("operator block does not match its support");
    if (!std::isfinite(identity_weight) || !block.allFinite()) throw InvalidInput("operator has non-finite entries");
  }

  /// The operator compressed to the index set u (a superset of support).
  Eigen::MatrixXd restricted_to(const std::vector<std::uint64_t>& u) const {
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixXd out = identity_weight * Eigen::MatrixXd::Identity(n, n);
    const auto pos = detail::positions_in(support, u);
    for (std::size_t i = 0; i < pos.size(); ++i)
      for (std::size_t j = 0; j < pos.size(); ++j)
        out(static_cast<Eigen::Index>(pos[i]), static_cast<Eigen::Index>(pos[j])) =
            block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
  }

  Eigen::MatrixXd to_dense() const {
    if (dim > 8192) throw BudgetExceeded("operator too large for a dense view");
    std::vector<std::uint64_t> all(dim);
    std::iota(all.begin(), all.end(), std::uint64_t{0});
    return restricted_to(all);
  }

  double hermiticity_defect() const {
    return block.size() == 0 ? 0.0 : (block - block.transpose()).cwiseAbs().maxCoeff();
  }

  /// max |(h^2 - h)_{ij}|
  double projector_defect() const {
    double d = std::abs(identity_weight * identity_weight - identity_weight);
    if (block.size() != 0) d = std::max(d, (block * block - block).cwiseAbs().maxCoeff());
    return d;
  }

  double min_eigenvalue() const {
    double lo = support.size() < dim ? identity_weight : std::numeric_limits<double>::infinity();
    if (block.size() != 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block, Eigen::EigenvaluesOnly);
      lo = std::min(lo, es.eigenvalues().minCoeff());
    }
    return lo;
  }
};

inline OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim != b.dim) throw InvalidInput("operator dimensions differ");
  OperatorMatrix out{a.dim, detail::merge_support(a.support, b.support), {}, a.identity_weight - b.identity_weight};
  out.block = a.restricted_to(out.support) - b.restricted_to(out.support);
  return out;
}

/// Kernel (eigenvalues within tol of zero, relative to the spectral scale).
inline Subspace kernel(const OperatorMatrix& h, double tol = 1e-10) {
  h.validate();
  Subspace s{h.dim, h.support, Eigen::MatrixXd(static_cast<Eigen::Index>(h.support.size()), 0)};
  double scale = std::max(1.0, std::abs(h.identity_weight));
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  if (h.block.size() != 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.block);
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
    scale = std::max(scale, evals.cwiseAbs().maxCoeff());
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    if (std::abs(evals(i)) <= tol * scale) keep.push_back(i);
  const bool complement = h.support.size() < h.dim && std::abs(h.identity_weight) <= tol * scale;
  if (complement) {
    // whole complement is in the kernel; spell it out
    if (h.dim > 8192) throw BudgetExceeded("kernel includes a complement too large to list");
    std::vector<std::uint64_t> all(h.dim);
    std::iota(all.begin(), all.end(), std::uint64_t{0});
    const auto pos = detail::positions_in(h.support, all);
    std::vector<bool> in_support(h.dim, false);
    for (auto x : h.support) in_support[x] = true;
    const Eigen::Index extra = static_cast<Eigen::Index>(h.dim - h.support.size());
    s.support = all;
    s.basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h.dim), static_cast<Eigen::Index>(keep.size()) + extra);
    for (std::size_t j = 0; j < keep.size(); ++j)
      for (std::size_t i = 0; i < pos.size(); ++i)
        s.basis(static_cast<Eigen::Index>(pos[i]), static_cast<Eigen::Index>(j)) =
            evecs(static_cast<Eigen::Index>(i), keep[j]);
    Eigen::Index col = static_cast<Eigen::Index>(keep.size());
    for (std::uint64_t x = 0; x < h.dim; ++x)
      if (!in_support[x]) s.basis(static_cast<Eigen::Index>(x), col++) = 1.0;
    return s;
  }
  s.basis.resize(static_cast<Eigen::Index>(h.support.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) s.basis.col(static_cast<Eigen::Index>(j)) = evecs.col(keep[j]);
  return s;
}

/// True iff h annihilates every vector of s (entrywise residual <= tol).
inline bool annihilates(const OperatorMatrix& h, const Subspace& s, double tol = 1e-10) {
  if (h.dim != s.dim) throw InvalidInput("operator and subspace live in different spaces");
  if (s.rank() == 0) return true;
  const auto u = detail::merge_support(h.support, s.support);
  return (h.restricted_to(u) * detail::embed(s, u)).cwiseAbs().maxCoeff() <= tol;
}

/// 1 - P onto Im chi(A, region).
inline OperatorMatrix parent_term(const Tensor<double>& a, const Region& region, double tol = 1e-10) {
  const Subspace im = image_basis(chi_matrix(a, region), tol);
  const auto n = static_cast<Eigen::Index>(im.support.size());
  OperatorMatrix h{im.dim, im.support, Eigen::MatrixXd::Identity(n, n) - im.basis * im.basis.transpose(), 1.0};
  return h;
}

/// Ker h = Im chi(A, region), by mutual containment.
inline bool check_parent_property(const OperatorMatrix& h, const Tensor<double>& a, const Region& region,
                                  double tol = 1e-10) {
  const Subspace im = image_basis(chi_matrix(a, region), tol);
  if (h.dim != im.dim) throw InvalidInput("operator does not act on the region's physical space");
  return same_subspace(kernel(h, tol), im, tol);
}

/// min eigenvalue of h1 - h2 >= -tol.
inline bool dominates(const OperatorMatrix& h1, const OperatorMatrix& h2, double tol = 1e-10) {
  h1.validate();
  h2.validate();
  if (h1.dim != h2.dim) throw InvalidInput("operator dimensions differ");
  return (h1 - h2).min_eigenvalue() >= -tol;
}

/// The tiling term on a plaquette pair as an operator: diagonal, with entry
/// bulk_term_energy on each pair basis state.
inline OperatorMatrix tiling_term(const TileSet& ts, Orientation o) {
  const std::uint64_t g = ts.num_colors();
  const std::uint64_t d = g * g * g * g;
  std::vector<std::uint64_t> sup;
  for (const Tile& a : ts.tiles())
    for (const Tile& b : ts.tiles())
      if (bulk_term_energy(ts, a, b, o) == 0) sup.push_back(plaquette_index(a, g) * d + plaquette_index(b, g));
  std::sort(sup.begin(), sup.end());
  const auto n = static_cast<Eigen::Index>(sup.size());
  return {d * d, sup, Eigen::MatrixXd::Zero(n, n), 1.0};
}

enum class BlockLayout { ground_first, zt_first };

/// Im chi(A_G + A_Z (x) A_T, R) against Im chi(A_G, R) + Im chi(A_Z, R) (x)
/// Im chi(A_T, R) embedded blockwise. Composed local index: g for the ground
/// block, d_G + z d_T + t for the product block (ground_first). zt_first puts
/// the product block first, which is not the composed tensor's layout.
inline bool check_image_decomposition(const Tensor<double>& ag, const Tensor<double>& az, const Tensor<double>& at,
                                      const Region& region, BlockLayout layout = BlockLayout::ground_first,
                                      double tol = 1e-10) {
  const Tensor<double> composed = direct_sum(ag, tensor_product(az, at));
  const Subspace lhs = image_basis(chi_matrix(composed, region), tol);

  const std::uint64_t dg = ag.dim(Leg::phys), dz = az.dim(Leg::phys), dt = at.dim(Leg::phys);
  const std::uint64_t d = dg + dz * dt;
  const std::size_t k = region.size();
  auto local = [&](bool ground, std::uint64_t x) -> std::uint64_t {
    if (layout == BlockLayout::ground_first) return ground ? x : dg + x;
    return ground ? dz * dt + x : x;
  };
  auto digits = [&](std::uint64_t idx, std::uint64_t base) {
    std::vector<std::uint64_t> v(k);
    for (std::size_t i = k; i-- > 0;) {
      v[i] = idx % base;
      idx /= base;
    }
    return v;
  };

  // Collect the right-hand side as explicit sparse vectors.
  std::vector<std::map<std::uint64_t, double>> vecs;
  const Subspace sg = image_basis(chi_matrix(ag, region), tol);
  for (std::size_t j = 0; j < sg.rank(); ++j) {
    std::map<std::uint64_t, double> v;
    for (std::size_t i = 0; i < sg.support.size(); ++i) {
      std::uint64_t idx = 0;
      for (auto x : digits(sg.support[i], dg)) idx = idx * d + local(true, x);
      v[idx] = sg.basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    vecs.push_back(std::move(v));
  }
  const Subspace sz = image_basis(chi_matrix(az, region), tol);
  const Subspace st = image_basis(chi_matrix(at, region), tol);
  for (std::size_t jz = 0; jz < sz.rank(); ++jz)
    for (std::size_t jt = 0; jt < st.rank(); ++jt) {
      std::map<std::uint64_t, double> v;
      for (std::size_t iz = 0; iz < sz.support.size(); ++iz) {
        const auto zs = digits(sz.support[iz], dz);
        const double vz = sz.basis(static_cast<Eigen::Index>(iz), static_cast<Eigen::Index>(jz));
        for (std::size_t it = 0; it < st.support.size(); ++it) {
          const auto ts = digits(st.support[it], dt);
          std::uint64_t idx = 0;
          for (std::size_t c = 0; c < k; ++c) idx = idx * d + local(false, zs[c] * dt + ts[c]);
          v[idx] = vz * st.basis(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(jt));
        }
      }
      vecs.push_back(std::move(v));
    }

  Subspace rhs;
  rhs.dim = lhs.dim;
  std::set<std::uint64_t> sup;
  for (const auto& v : vecs)
    for (const auto& [i, _] : v) sup.insert(i);
  rhs.support.assign(sup.begin(), sup.end());
  rhs.basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rhs.support.size()), static_cast<Eigen::Index>(vecs.size()));
  for (std::size_t j = 0; j < vecs.size(); ++j)
    for (const auto& [i, x] : vecs[j]) {
      const auto p = std::lower_bound(rhs.support.begin(), rhs.support.end(), i) - rhs.support.begin();
      rhs.basis(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) = x;
    }
  // the pieces are orthonormal within each block and the blocks are disjoint
  return same_subspace(lhs, rhs, 1e-8);
}

struct GapDims {
  std::uint64_t h1 = 1;
  std::uint64_t h2 = 0;
  std::uint64_t gamma = 0;
};

/// Pair term on (H1 + H2 (x) H_Gamma)^(x)2, local index 0 for H1 and
/// 1 + z*dim(H_Gamma) + t otherwise:
///   |0><0| (x) 1^ZT + 1^ZT (x) |0><0| + hZ (x) 1^T + 1^Z (x) hT,
/// where 1^ZT projects onto the H2 (x) H_Gamma block and the last two terms
/// act on the block pair (H2 (x) H_Gamma)^(x)2.
inline OperatorMatrix compose_gap_term(const OperatorMatrix& hz, const OperatorMatrix& ht, GapDims dims) {
  if (dims.h1 != 1) throw InvalidInput("the ground block must be one-dimensional");
  if (hz.dim != dims.h2 * dims.h2) throw InvalidInput("hZ does not act on H2 (x) H2");
  if (ht.dim != dims.gamma * dims.gamma) throw InvalidInput("hT does not act on H_Gamma (x) H_Gamma");
  const std::uint64_t zt = dims.h2 * dims.gamma, d = 1 + zt;
  if (d * d > 4096) throw BudgetExceeded("composed pair space too large for a dense term");
  const Eigen::MatrixXd z = hz.to_dense(), t = ht.to_dense();
  const auto n = static_cast<Eigen::Index>(d * d);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (std::uint64_t x = 1; x < d; ++x) {
    h(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) += 1.0;                  // |0> (x) ZT
    h(static_cast<Eigen::Index>(x * d), static_cast<Eigen::Index>(x * d)) += 1.0;          // ZT (x) |0>
  }
  const std::uint64_t g = dims.gamma, h2 = dims.h2;
  for (std::uint64_t a = 0; a < zt * zt; ++a)
    for (std::uint64_t b = 0; b < zt * zt; ++b) {
      const std::uint64_t xa = a / zt, ya = a % zt, xb = b / zt, yb = b % zt;  // local indices minus 1
      const std::uint64_t za = xa / g, ta = xa % g, za2 = ya / g, ta2 = ya % g;
      const std::uint64_t zb = xb / g, tb = xb % g, zb2 = yb / g, tb2 = yb % g;
      double v = 0;
      if (ta == tb && ta2 == tb2)
        v += z(static_cast<Eigen::Index>(za * h2 + za2), static_cast<Eigen::Index>(zb * h2 + zb2));
      if (za == zb && za2 == zb2)
        v += t(static_cast<Eigen::Index>(ta * g + ta2), static_cast<Eigen::Index>(tb * g + tb2));
      if (v == 0) continue;
      const auto ra = static_cast<Eigen::Index>((1 + xa) * d + 1 + ya);
      const auto rb = static_cast<Eigen::Index>((1 + xb) * d + 1 + yb);
      h(ra, rb) += v;
    }
  return OperatorMatrix::dense(h);
}

/// span|00> + Ker hZ (x) Ker hT, embedded as in compose_gap_term.
inline Subspace expected_gap_kernel(const Subspace& kz, const Subspace& kt, GapDims dims) {
  const std::uint64_t g = dims.gamma, h2 = dims.h2, d = 1 + h2 * g;
  std::vector<std::map<std::uint64_t, double>> vecs{{{0, 1.0}}};
  for (std::size_t jz = 0; jz < kz.rank(); ++jz)
    for (std::size_t jt = 0; jt < kt.rank(); ++jt) {
      std::map<std::uint64_t, double> v;
      for (std::size_t iz = 0; iz < kz.support.size(); ++iz)
        for (std::size_t it = 0; it < kt.support.size(); ++it) {
          const std::uint64_t z1 = kz.support[iz] / h2, z2 = kz.support[iz] % h2;
          const std::uint64_t t1 = kt.support[it] / g, t2 = kt.support[it] % g;
          const std::uint64_t idx = (1 + z1 * g + t1) * d + 1 + z2 * g + t2;
          v[idx] += kz.basis(static_cast<Eigen::Index>(iz), static_cast<Eigen::Index>(jz)) *
                    kt.basis(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(jt));
        }
      vecs.push_back(std::move(v));
    }
  Subspace s;
  s.dim = d * d;
  std::set<std::uint64_t> sup;
  for (const auto& v : vecs)
    for (const auto& [i, _] : v) sup.insert(i);
  s.support.assign(sup.begin(), sup.end());
  s.basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.support.size()), static_cast<Eigen::Index>(vecs.size()));
  for (std::size_t j = 0; j < vecs.size(); ++j)
    for (const auto& [i, x] : vecs[j])
      s.basis(std::lower_bound(s.support.begin(), s.support.end(), i) - s.support.begin(), static_cast<Eigen::Index>(j)) = x;
  return s;
}

}  // namespace tilepeps
