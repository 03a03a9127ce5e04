#include <catch2/catch_amalgamated.hpp>

#include "carpet/geometry.hpp"

using namespace carpet;

TEST_CASE("cell boxes by iterated similitudes") {
  // empty word is the whole carpet
  const CellBox root = cell_box(Word(""));
  CHECK(root.min_x == -2);
  CHECK(root.min_y == -2);
  CHECK(root.side == 4);
  CHECK(root.level == 0);

  // K_1 = [-1/2,-1/6] x [-1/2,-1/6], denominator 12
  const CellBox k1 = cell_box(Word("1"));
  CHECK(k1.min_x == -6);
  CHECK(k1.min_y == -6);
  CHECK(k1.side == 4);
  CHECK(k1.level == 1);

  // K_15: upper-right ninth of K_1 = [-5/18,-1/6]^2, denominator 36
  const CellBox k15 = cell_box(Word("15"));
  CHECK(k15.min_x == -10);
  CHECK(k15.min_y == -10);
  CHECK(k15.side == 4);

  // index-based min corners agree with the word-based routine
  for (std::int64_t i = 0; i < 64; ++i) {
    const Word w = Word::from_index(i, 2);
    const CellBox b = cell_box(w);
    const auto mn = cell_min_from_index(i, 2);
    CHECK(b.min_x == mn[0]);
    CHECK(b.min_y == mn[1]);
    CHECK(w.index() == i);
  }
}

TEST_CASE("cell intersection classification") {
  CHECK(cells_intersect(Word("1"), Word("2")) == Intersection::kSegment);
  CHECK(cells_intersect(Word("2"), Word("4")) == Intersection::kPoint);
  CHECK(cells_intersect(Word("1"), Word("3")) == Intersection::kDisjoint);
  CHECK_THROWS_AS(cells_intersect(Word("1"), Word("12")), std::invalid_argument);
  CHECK_THROWS_AS(cells_intersect(Word("1"), Word("1")), std::invalid_argument);

  // symmetric in its arguments over all distinct pairs of W_2
  for (std::int64_t i = 0; i < 64; ++i)
    for (std::int64_t j = i + 1; j < 64; ++j) {
      const Word v = Word::from_index(i, 2), w = Word::from_index(j, 2);
      CHECK(cells_intersect(v, w) == cells_intersect(w, v));
    }
}

TEST_CASE("symmetry action on words") {
  const auto& id = symmetry("I");
  const auto& tv = symmetry("T_v");
  const auto& rp = symmetry("R_+");

  CHECK(apply_symmetry(id, Word("1724")) == Word("1724"));
  CHECK(apply_symmetry(tv, Word("1")) == Word("3"));
  CHECK(apply_symmetry(rp, Word("2")) == Word("4"));

  // image boxes equal the boxes of image words
  for (const auto& t : symmetry_group()) {
    for (std::int64_t i = 0; i < 64; ++i) {
      const Word w = Word::from_index(i, 2);
      const CellBox b = cell_box(w);
      const auto c1 = t.apply(b.min_x, b.min_y);
      const auto c2 = t.apply(b.max_x(), b.max_y());
      const CellBox img = cell_box(apply_symmetry(t, w));
      CHECK(img.min_x == std::min(c1[0], c2[0]));
      CHECK(img.min_y == std::min(c1[1], c2[1]));
    }
  }
}

TEST_CASE("symmetry action respects composition") {
  for (const auto& s : symmetry_group()) {
    for (const auto& t : symmetry_group()) {
      // compose matrices
      SymmetryElement st{"st", {}};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          st.m[i][j] = s.m[i][0] * t.m[0][j] + s.m[i][1] * t.m[1][j];
      for (std::int64_t idx = 0; idx < 64; ++idx) {
        const Word w = Word::from_index(idx, 2);
        CHECK(apply_symmetry(st, w) == apply_symmetry(s, apply_symmetry(t, w)));
      }
    }
  }
}

TEST_CASE("the eight symmetries form the dihedral group with orthogonal matrices") {
  CHECK(symmetry_group().size() == 8);
  for (const auto& t : symmetry_group()) {
    const int det = t.m[0][0] * t.m[1][1] - t.m[0][1] * t.m[1][0];
    CHECK((det == 1 || det == -1));
    // columns orthonormal over the integers
    CHECK(t.m[0][0] * t.m[0][0] + t.m[1][0] * t.m[1][0] == 1);
    CHECK(t.m[0][1] * t.m[0][1] + t.m[1][1] * t.m[1][1] == 1);
    CHECK(t.m[0][0] * t.m[0][1] + t.m[1][0] * t.m[1][1] == 0);
  }
}

TEST_CASE("lattice points and similitudes") {
  const LatticePoint p1 = fixed_point(1);
  CHECK(p1.x == -2);
  CHECK(p1.y == -2);
  CHECK(apply_similitude(1, p1) == p1);  // fixed point of F_1

  // equality across denominators
  const LatticePoint a{-6, 0, 1};  // (-1/2, 0)
  const LatticePoint b{-2, 0, 0};
  CHECK(a == b);
  CHECK(a != fixed_point(4));

  // midpoints are in the carpet and integral at level 0
  for (int m = 0; m < 4; ++m) {
    const LatticePoint mp = diagonal_midpoint(m);
    CHECK(std::abs(mp.x) == 1);
    CHECK(std::abs(mp.y) == 1);
  }
}

TEST_CASE("point-in-cell membership and containing cells") {
  const CellBox k1 = cell_box(Word("1"));
  CHECK(point_in_cell(fixed_point(1), k1));
  CHECK(point_in_cell(diagonal_midpoint(0), k1));
  CHECK(!point_in_cell(fixed_point(5), k1));

  // the bottom-left corner lies in exactly one level-2 cell (word "11")
  const auto cells = cells_containing(fixed_point(1), 2);
  REQUIRE(cells.size() == 1);
  CHECK(Word::from_index(cells[0], 2) == Word("11"));

  // a point interior to a shared vertical edge lies in two cells
  const LatticePoint edge_pt{-2, 0, 1};  // (-1/6, 0) on K_8 | hole boundary
  const auto cells8 = cells_containing(edge_pt, 1);
  REQUIRE(cells8.size() == 1);  // right neighbor is the removed center
  CHECK(Word::from_index(cells8[0], 1) == Word("8"));

  const LatticePoint shared{-6, 0, 1};  // (-1/2, 0): corner of K_7/K_8? no: side point
  const auto cells_lr = cells_containing(shared, 1);
  CHECK(cells_lr.size() == 1);  // on the outer boundary, only K_8
}

TEST_CASE("adapted scale") {
  // same level-3 cell: containment gives at least 3
  const Word w("123");
  const CellBox b = cell_box(w);
  const LatticePoint x{b.min_x, b.min_y, 3};
  const LatticePoint y{b.min_x + 1, b.min_y + 1, 3};
  CHECK(adapted_scale(x, y) >= 3);

  // opposite corners: no intersecting level-1 pair contains both
  CHECK(adapted_scale(fixed_point(1), fixed_point(5)) == 0);

  // p_2 and the diagonal midpoint of K_1: K_1 and K_2 intersect at level 1,
  // no intersecting level-2 pair contains both
  CHECK(adapted_scale(fixed_point(2), diagonal_midpoint(0)) == 1);

  CHECK_THROWS_AS(adapted_scale(fixed_point(2), fixed_point(2)), std::invalid_argument);
}

TEST_CASE("measure weights sum to one") {
  // 8^n cells of weight 8^{-n}
  for (int n = 1; n <= 6; ++n) CHECK(pow8(n) == static_cast<std::int64_t>(std::llround(std::pow(8.0, n))));
  double total = 0.0;
  for (std::int64_t i = 0; i < pow8(3); ++i) total += 1.0 / static_cast<double>(pow8(3));
  CHECK(total == Catch::Approx(1.0).epsilon(1e-12));
}
