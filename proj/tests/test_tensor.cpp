#include <gtest/gtest.h>

#include "support.hpp"

using namespace tilepeps;
using namespace tilepeps::testing;

namespace {

std::vector<std::uint64_t> dims(const Tensor<BigInt>& t) {
  std::vector<std::uint64_t> out;
  for (const auto& l : t.legs()) out.push_back(l.dim);
  return out;
}

}  // namespace

TEST(Bulk, Monochrome) {
  const auto a = bulk_tensor(monochrome());
  EXPECT_EQ(dims(a), (std::vector<std::uint64_t>{1, 1, 1, 1, 1}));
  ASSERT_EQ(a.nonzeros().size(), 1u);
  EXPECT_EQ(a.nonzeros()[0].second, 1);
}

TEST(Bulk, EmptyTileSetIsZero) {
  const auto a = bulk_tensor(TileSet({"a", "b"}, {}));
  EXPECT_TRUE(a.nonzeros().empty());
  EXPECT_EQ(a.size(), 16u * 16u);
}

TEST(Bulk, OneNonzeroPerTile) {
  const TileSet ts({"a", "b"}, {{0, 0, 0, 0}});
  const auto a = bulk_tensor(ts);
  EXPECT_EQ(a.size(), 256u);
  ASSERT_EQ(a.nonzeros().size(), 1u);
  EXPECT_EQ(a.at({0, 0, 0, 0, 0}), 1);

  const auto s = bulk_tensor(stripe());
  EXPECT_EQ(s.at({0, 1, 2, 2, plaquette_index({0, 1, 2, 2}, 3)}), 1);
  EXPECT_EQ(s.at({1, 0, 2, 2, plaquette_index({1, 0, 2, 2}, 3)}), 1);
  EXPECT_EQ(s.at({1, 0, 2, 2, plaquette_index({0, 1, 2, 2}, 3)}), 0);
  EXPECT_EQ(s.nonzeros().size(), 2u);
}

TEST(Boundary, EdgeAndCorner) {
  const auto up = boundary_tensor(monochrome(), {{Leg::up, 0}});
  EXPECT_EQ(up.legs().size(), 4u);
  EXPECT_FALSE(up.has(Leg::up));
  EXPECT_EQ(up.nonzeros().size(), 1u);

  const TileSet ts({"a", "b"}, {{0, 0, 0, 0}});
  EXPECT_TRUE(boundary_tensor(ts, {{Leg::up, 1}}).nonzeros().empty());

  const auto corner = boundary_tensor(monochrome(), {{Leg::up, 0}, {Leg::left, 0}});
  EXPECT_EQ(corner.legs().size(), 3u);
  EXPECT_EQ(corner.nonzeros().size(), 1u);

  EXPECT_THROW(boundary_tensor(monochrome(), {{Leg::phys, 0}}), InvalidInput);
  EXPECT_THROW(boundary_tensor(monochrome(), {{Leg::up, 2}}), InvalidInput);
}

TEST(Assemble, Shapes) {
  const auto one = assemble_peps(uniform_instance(monochrome(), 1, 1, 0));
  ASSERT_EQ(one.sites.size(), 1u);
  EXPECT_EQ(one.sites[0].legs().size(), 1u);  // physical leg only

  const auto two = assemble_peps(uniform_instance(monochrome(), 2, 2, 0));
  for (const auto& t : two.sites) EXPECT_EQ(t.legs().size(), 3u);  // two virtual legs + phys

  const auto three = assemble_peps(uniform_instance(monochrome(), 3, 3, 0));
  EXPECT_EQ(three.at(1, 1).legs().size(), 5u);
  EXPECT_EQ(three.at(0, 1).legs().size(), 4u);
}

TEST(Norm, Examples) {
  EXPECT_EQ(norm_squared(assemble_peps(uniform_instance(monochrome(), 2, 2, 0))), 1);
  EXPECT_EQ(norm_squared(assemble_peps(uniform_instance(TileSet({"a"}, {}), 2, 2, 0))), 0);
  EXPECT_TRUE(zero_test_open(assemble_peps(uniform_instance(TileSet({"a"}, {}), 2, 2, 0))));
  EXPECT_FALSE(zero_test_open(assemble_peps(uniform_instance(monochrome(), 3, 3, 0))));
}

TEST(Norm, EqualsCountOnCorpus) {
  for (const auto& inst : corpus()) {
    const auto g = assemble_peps(inst);
    const BigInt c = count(inst);
    EXPECT_EQ(norm_squared(g), c);
    EXPECT_EQ(norm_squared(g, 4096, ContractionOrder::columns), c);
    EXPECT_EQ(zero_test_open(g), c == 0);
  }
}

TEST(Norm, FloatModeAgrees) {
  for (const auto& inst : corpus(40)) {
    PepsGrid<double> g{inst.rows, inst.cols, false, {}};
    for (const auto& t : assemble_peps(inst).sites) g.sites.push_back(t.to_float());
    const double n = norm_squared(g);
    EXPECT_EQ(n, count(inst).convert_to<double>());
    EXPECT_NEAR(norm_squared(g, 4096, ContractionOrder::columns), n, 1e-10 * std::max(1.0, n));
    EXPECT_EQ(zero_test_open(g), count(inst) == 0);
  }
}

TEST(Norm, AmplitudesAreZeroOrOne) {
  for (const auto& inst : corpus(60)) {
    const auto amps = state_amplitudes(assemble_peps(inst));
    EXPECT_EQ(BigInt(amps.size()), count(inst));
    for (const auto& [_, a] : amps) EXPECT_EQ(a, 1);
  }
}

TEST(Norm, BudgetRefuses) {
  // vertical links are free inside the lattice: 2^4 boundary states per row
  const TileSet free_set({"a", "b"}, {{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {1, 1, 0, 0}});
  const auto inst = uniform_instance(free_set, 3, 4, 0);
  EXPECT_THROW(norm_squared(assemble_peps(inst), 8), BudgetExceeded);
  EXPECT_EQ(norm_squared(assemble_peps(inst)), 256);
  EXPECT_EQ(count(inst), 256);
}

TEST(Torus, ZeroTestMatchesCount) {
  EXPECT_FALSE(zero_test_torus(monochrome(), 3, 2));
  EXPECT_TRUE(zero_test_torus(stripe(), 2, 3));
  EXPECT_FALSE(zero_test_torus(stripe(), 2, 2));
  EXPECT_TRUE(zero_test_torus(TileSet({"a"}, {}), 2, 2));
  std::set<std::vector<Tile>> seen;
  for (const auto& inst : corpus()) {
    if (!seen.insert(inst.tileset.tiles()).second) continue;
    for (std::size_t lx = 1; lx <= 4; ++lx)
      for (std::size_t ly = 1; ly <= 4; ++ly) {
        const BigInt c = torus_count(inst.tileset, lx, ly);
        ASSERT_EQ(norm_squared(torus_peps(inst.tileset, lx, ly), 1 << 16), c) << lx << "x" << ly;
        ASSERT_EQ(zero_test_torus(inst.tileset, lx, ly, 1 << 16), c == 0);
      }
  }
}

TEST(Combinators, DirectSumOfZeros) {
  const std::vector<LegSpec> legs{{Leg::up, 2}, {Leg::down, 2}, {Leg::left, 1}, {Leg::right, 1}, {Leg::phys, 3}};
  const Tensor<double> z(legs, {});
  const auto s = direct_sum(z, z);
  EXPECT_TRUE(s.nonzeros().empty());
  EXPECT_EQ(s.dim(Leg::up), 4u);
  EXPECT_EQ(s.dim(Leg::phys), 6u);
}

TEST(Combinators, ProductDims) {
  std::mt19937_64 rng(1);
  const auto a = random_tensor(rng, 2, 3);
  const auto b = random_tensor(rng, 2, 16);
  const auto p = tensor_product(a, b);
  for (Leg l : kVirtualLegs) EXPECT_EQ(p.dim(l), 4u);
  EXPECT_EQ(p.dim(Leg::phys), 48u);
  // entry (i (x) j) = a_i b_j
  EXPECT_DOUBLE_EQ(p.at({3, 2, 1, 0, 47}), a.at({1, 1, 0, 0, 2}) * b.at({1, 0, 1, 0, 15}));
}

TEST(Combinators, LegOrderIsMatchedByLabel) {
  std::mt19937_64 rng(2);
  const auto a = random_tensor(rng, 2, 2);
  const auto b = a.permuted({Leg::phys, Leg::right, Leg::left, Leg::down, Leg::up});
  EXPECT_EQ(direct_sum(a, b), direct_sum(a, a));
  EXPECT_THROW(direct_sum(a, boundary_tensor<double>(monochrome(), {{Leg::up, 0}})), InvalidInput);
}

TEST(Combinators, DirectSumStateIsBlockSum) {
  // On a 2x2 open patch the state of A (+) B is the two component states
  // embedded in the direct-sum physical space.
  std::mt19937_64 rng(4);
  auto open_patch = [](const Tensor<double>& t) {
    PepsGrid<double> g{2, 2, false, {}};
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) {
        std::vector<Leg> drop;
        if (r == 0) drop.push_back(Leg::down);
        if (r == 1) drop.push_back(Leg::up);
        if (c == 0) drop.push_back(Leg::left);
        if (c == 1) drop.push_back(Leg::right);
        // pin the outward legs to index 0
        std::vector<LegSpec> legs;
        for (const auto& l : t.legs())
          if (std::find(drop.begin(), drop.end(), l.label) == drop.end()) legs.push_back(l);
        std::vector<std::pair<std::uint64_t, double>> entries;
        for (const auto& [flat, v] : t.nonzeros()) {
          const auto idx = t.unflatten(flat);
          bool keep = true;
          std::uint64_t f = 0;
          for (std::size_t i = 0; i < idx.size(); ++i) {
            if (std::find(drop.begin(), drop.end(), t.legs()[i].label) != drop.end())
              keep = keep && idx[i] == 0;
            else
              f = f * t.legs()[i].dim + idx[i];
          }
          if (keep) entries.emplace_back(f, v);
        }
        g.sites.emplace_back(legs, entries);
      }
    return g;
  };
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_tensor(rng, 2, 2, 0.2), b = random_tensor(rng, 2, 3, 0.2);
    const auto pa = open_patch(a), pb = open_patch(b);
    PepsGrid<double> sum{2, 2, false, {}};
    for (std::size_t i = 0; i < 4; ++i) sum.sites.push_back(direct_sum(pa.sites[i], pb.sites[i]));

    std::map<std::vector<std::uint64_t>, double> expected = state_amplitudes(pa);
    for (const auto& [key, v] : state_amplitudes(pb)) {
      auto shifted = key;
      for (auto& x : shifted) x += 2;  // B's physical block follows A's
      expected[shifted] += v;
    }
    EXPECT_EQ(state_amplitudes(sum), expected);
  }
}
