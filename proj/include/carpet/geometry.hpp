#pragma once

// Exact integer geometry of the planar Sierpinski carpet.
//
// The unit square is [-1/2, 1/2]^2. A point or box "at level n" stores
// integer coordinates scaled by 4*3^n, so cell corners, side midpoints and
// the quarter-diagonal anchor points are all integral and every predicate
// below (membership, adjacency, symmetry images) is exact.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace carpet {

inline constexpr int kNumCells = 8;  // cells per subdivision step
inline constexpr int kSubdiv = 3;    // inverse contraction ratio

// doubled fixed points 2*p_i, i = 1..8 (p_1 bottom-left corner, then
// counterclockwise around the square: corners odd, side midpoints even)
inline constexpr std::array<std::array<int, 2>, 8> kAnchor2{{
    {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0},
}};

inline std::int64_t pow3(int n) {
  std::int64_t r = 1;
  while (n-- > 0) r *= 3;
  return r;
}

inline std::int64_t pow8(int n) {
  std::int64_t r = 1;
  while (n-- > 0) r *= 8;
  return r;
}

// coordinate denominator at level n
inline std::int64_t denom(int level) { return 4 * pow3(level); }

struct BadWord : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A level-n address over symbols {1,...,8}; the empty word is the carpet.
struct Word {
  std::vector<std::uint8_t> symbols;  // most significant first

  Word() = default;
  explicit Word(std::vector<std::uint8_t> s) : symbols(std::move(s)) { validate(); }
  explicit Word(const std::string& digits) {
    symbols.reserve(digits.size());
    for (char c : digits) {
      if (c < '1' || c > '8') throw BadWord("word digit outside 1..8");
      symbols.push_back(static_cast<std::uint8_t>(c - '0'));
    }
  }

  int level() const { return static_cast<int>(symbols.size()); }
  bool empty() const { return symbols.empty(); }

  std::string str() const {
    std::string s;
    s.reserve(symbols.size());
    for (auto d : symbols) s.push_back(static_cast<char>('0' + d));
    return s;
  }

  Word concat(const Word& tail) const {
    Word w = *this;
    w.symbols.insert(w.symbols.end(), tail.symbols.begin(), tail.symbols.end());
    return w;
  }

  Word prefix(int n) const {
    Word w;
    w.symbols.assign(symbols.begin(), symbols.begin() + n);
    return w;
  }

  // rank in the lexicographic enumeration of W_n (== base-8 value of digits-1)
  std::int64_t index() const {
    std::int64_t r = 0;
    for (auto d : symbols) r = r * 8 + (d - 1);
    return r;
  }

  static Word from_index(std::int64_t idx, int level) {
    std::vector<std::uint8_t> s(static_cast<size_t>(level));
    for (int k = level - 1; k >= 0; --k) {
      s[static_cast<size_t>(k)] = static_cast<std::uint8_t>(idx % 8 + 1);
      idx /= 8;
    }
    return Word(std::move(s));
  }

  bool operator==(const Word& o) const { return symbols == o.symbols; }
  bool operator!=(const Word& o) const { return !(*this == o); }

 private:
  void validate() const {
    for (auto d : symbols)
      if (d < 1 || d > 8) throw BadWord("word symbol outside 1..8");
  }
};

// Exact bounding square of a cell K_w, coordinates scaled by 4*3^level.
struct CellBox {
  std::int64_t min_x = 0;
  std::int64_t min_y = 0;
  std::int64_t side = 0;
  int level = 0;  // denominator exponent

  std::int64_t max_x() const { return min_x + side; }
  std::int64_t max_y() const { return min_y + side; }

  bool operator==(const CellBox& o) const {
    return min_x == o.min_x && min_y == o.min_y && side == o.side && level == o.level;
  }
};

// K_w = F_{w_1} ... F_{w_m}(K); min corner = F_w((-1/2,-1/2)) in closed form.
inline CellBox cell_box(const Word& w) {
  const int m = w.level();
  CellBox b;
  b.level = m;
  b.side = 4;  // a level-m cell has side exactly 4 at denominator 4*3^m
  std::int64_t sx = -2, sy = -2;
  std::int64_t scale = 1;  // 3^{m-1-k} for the symbol at position k
  for (int k = m - 1; k >= 0; --k) {
    const auto& a = kAnchor2[w.symbols[static_cast<size_t>(k)] - 1];
    sx += 4 * scale * a[0];
    sy += 4 * scale * a[1];
    scale *= 3;
  }
  b.min_x = sx;
  b.min_y = sy;
  return b;
}

// min corner of the cell with the given index at the given level (avoids
// materializing Word objects in hot loops)
inline std::array<std::int64_t, 2> cell_min_from_index(std::int64_t idx, int level) {
  std::int64_t sx = -2, sy = -2, scale = 1;
  for (int k = 0; k < level; ++k) {
    const int d = static_cast<int>(idx % 8);
    idx /= 8;
    sx += 4 * scale * kAnchor2[static_cast<size_t>(d)][0];
    sy += 4 * scale * kAnchor2[static_cast<size_t>(d)][1];
    scale *= 3;
  }
  return {sx, sy};
}

enum class Intersection { kDisjoint, kPoint, kSegment };

// Classifies the intersection of two distinct equal-level closed cells.
inline Intersection cells_intersect(const Word& v, const Word& w) {
  if (v.level() != w.level()) throw std::invalid_argument("cells_intersect: unequal levels");
  if (v == w) throw std::invalid_argument("cells_intersect: identical words");
  const CellBox a = cell_box(v), b = cell_box(w);
  const std::int64_t ox = std::min(a.max_x(), b.max_x()) - std::max(a.min_x, b.min_x);
  const std::int64_t oy = std::min(a.max_y(), b.max_y()) - std::max(a.min_y, b.min_y);
  if (ox < 0 || oy < 0) return Intersection::kDisjoint;
  if (ox > 0 && oy > 0) throw std::logic_error("cells_intersect: overlapping interiors");
  if (ox == 0 && oy == 0) return Intersection::kPoint;
  return Intersection::kSegment;
}

// The dihedral symmetry group of the square, as exact integer matrices.
struct SymmetryElement {
  const char* name;
  std::array<std::array<int, 2>, 2> m;  // row-major 2x2

  std::array<std::int64_t, 2> apply(std::int64_t x, std::int64_t y) const {
    return {m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y};
  }
};

inline const std::array<SymmetryElement, 8>& symmetry_group() {
  static const std::array<SymmetryElement, 8> g{{
      {"I", {{{1, 0}, {0, 1}}}},
      {"-I", {{{-1, 0}, {0, -1}}}},
      {"T_v", {{{-1, 0}, {0, 1}}}},
      {"T_h", {{{1, 0}, {0, -1}}}},
      {"T_+", {{{0, 1}, {1, 0}}}},
      {"T_-", {{{0, -1}, {-1, 0}}}},
      {"R_+", {{{0, -1}, {1, 0}}}},
      {"R_-", {{{0, 1}, {-1, 0}}}},
  }};
  return g;
}

inline const SymmetryElement& symmetry(const std::string& name) {
  for (const auto& t : symmetry_group())
    if (name == t.name) return t;
  throw std::invalid_argument("unknown symmetry element: " + name);
}

// T(p_i) = p_{perm[i-1]}; T conjugates F_i to F_{perm(i)}, so the induced
// word map acts symbol by symbol.
inline std::array<std::uint8_t, 8> symbol_permutation(const SymmetryElement& t) {
  std::array<std::uint8_t, 8> perm{};
  for (int i = 0; i < 8; ++i) {
    const auto img = t.apply(kAnchor2[static_cast<size_t>(i)][0], kAnchor2[static_cast<size_t>(i)][1]);
    bool found = false;
    for (int j = 0; j < 8; ++j) {
      if (img[0] == kAnchor2[static_cast<size_t>(j)][0] && img[1] == kAnchor2[static_cast<size_t>(j)][1]) {
        perm[static_cast<size_t>(i)] = static_cast<std::uint8_t>(j + 1);
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("symmetry does not permute the anchors");
  }
  return perm;
}

inline Word apply_symmetry(const SymmetryElement& t, const Word& w) {
  const auto perm = symbol_permutation(t);
  Word out = w;
  for (auto& d : out.symbols) d = perm[d - 1];
  return out;
}

// A point of the unit square with exact coordinates x/(4*3^n), y/(4*3^n).
struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  int denom_level = 0;

  // lowest-terms representative (both coordinates divided by 3 while possible)
  LatticePoint normalized() const {
    LatticePoint p = *this;
    while (p.denom_level > 0 && p.x % 3 == 0 && p.y % 3 == 0) {
      p.x /= 3;
      p.y /= 3;
      --p.denom_level;
    }
    return p;
  }

  LatticePoint at_level(int level) const {
    if (level < denom_level) throw std::invalid_argument("at_level: would lose precision");
    const std::int64_t s = pow3(level - denom_level);
    return {x * s, y * s, level};
  }

  bool operator==(const LatticePoint& o) const {
    const LatticePoint a = normalized(), b = o.normalized();
    return a.x == b.x && a.y == b.y && a.denom_level == b.denom_level;
  }
  bool operator!=(const LatticePoint& o) const { return !(*this == o); }

  double fx() const { return static_cast<double>(x) / static_cast<double>(denom(denom_level)); }
  double fy() const { return static_cast<double>(y) / static_cast<double>(denom(denom_level)); }
};

inline LatticePoint fixed_point(int symbol) {
  const auto& a = kAnchor2[static_cast<size_t>(symbol - 1)];
  return {2 * a[0], 2 * a[1], 0};
}

// midpoint between p_{2m} and p_{2m+2} (indices mod 8, p_0 = p_8), m = 0..3
inline LatticePoint diagonal_midpoint(int m) {
  static constexpr std::array<std::array<int, 2>, 4> mids{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
  return {mids[static_cast<size_t>(m)][0], mids[static_cast<size_t>(m)][1], 0};
}

// F_i maps a level-n point to a level-(n+1) point exactly.
inline LatticePoint apply_similitude(int symbol, const LatticePoint& p) {
  const auto& a = kAnchor2[static_cast<size_t>(symbol - 1)];
  const std::int64_t c = 4 * pow3(p.denom_level);
  return {p.x + c * a[0], p.y + c * a[1], p.denom_level + 1};
}

inline LatticePoint apply_similitude(const Word& w, const LatticePoint& p) {
  LatticePoint q = p;
  for (int k = w.level() - 1; k >= 0; --k) q = apply_similitude(w.symbols[static_cast<size_t>(k)], q);
  return q;
}

inline bool point_in_cell(const LatticePoint& p, const CellBox& b) {
  const int lvl = std::max(p.denom_level, b.level);
  const std::int64_t sp = pow3(lvl - p.denom_level);
  const std::int64_t sb = pow3(lvl - b.level);
  const std::int64_t x = p.x * sp, y = p.y * sp;
  return x >= b.min_x * sb && x <= (b.min_x + b.side) * sb && y >= b.min_y * sb &&
         y <= (b.min_y + b.side) * sb;
}

// Is the grid address (col,row) in [0,3^level)^2 a carpet cell? (no middle-
// ninth digit pair), and if so, which word index.
inline bool grid_to_word_index(std::int64_t col, std::int64_t row, int level, std::int64_t* out) {
  // symbol from base-3 digit pair; -1 marks the removed center
  static constexpr int sym[3][3] = {{1, 8, 7}, {2, -1, 6}, {3, 4, 5}};  // [cx][cy]
  std::int64_t idx = 0;
  std::int64_t div = pow3(level - 1);
  for (int k = 0; k < level; ++k) {
    const int cx = static_cast<int>(col / div);
    const int cy = static_cast<int>(row / div);
    col %= div;
    row %= div;
    div /= 3;
    const int s = sym[cx][cy];
    if (s < 0) return false;
    idx = idx * 8 + (s - 1);
  }
  *out = idx;
  return true;
}

// All level-`level` cells whose closed box contains p (1, 2 or 4 of them).
inline std::vector<std::int64_t> cells_containing(const LatticePoint& p, int level) {
  const LatticePoint q = p.at_level(std::max(level, p.denom_level));
  const std::int64_t cell = 4 * pow3(q.denom_level - level);
  const std::int64_t nx = q.x + 2 * pow3(q.denom_level);  // shift to [0, 4*3^n]
  const std::int64_t ny = q.y + 2 * pow3(q.denom_level);
  const std::int64_t side_count = pow3(level);
  std::array<std::int64_t, 2> cols{}, rows{};
  int ncol = 0, nrow = 0;
  const std::int64_t qx = nx / cell, qy = ny / cell;
  if (nx % cell == 0) {
    if (qx - 1 >= 0) cols[ncol++] = qx - 1;
    if (qx < side_count) cols[ncol++] = qx;
  } else {
    cols[ncol++] = qx;
  }
  if (ny % cell == 0) {
    if (qy - 1 >= 0) rows[nrow++] = qy - 1;
    if (qy < side_count) rows[nrow++] = qy;
  } else {
    rows[nrow++] = qy;
  }
  std::vector<std::int64_t> out;
  for (int i = 0; i < ncol; ++i)
    for (int j = 0; j < nrow; ++j) {
      std::int64_t idx;
      if (grid_to_word_index(cols[i], rows[j], level, &idx)) out.push_back(idx);
    }
  return out;
}

// n(x,y): the deepest level at which some pair of intersecting cells contains
// x and y respectively. Monotone in the level, so the first failure stops.
inline int adapted_scale(const LatticePoint& x, const LatticePoint& y) {
  if (x == y) throw std::invalid_argument("adapted_scale: points coincide");
  const int cap = std::max(x.denom_level, y.denom_level) + 4;
  int best = 0;
  for (int m = 1; m <= cap; ++m) {
    const auto cx = cells_containing(x, m);
    const auto cy = cells_containing(y, m);
    bool ok = false;
    for (auto a : cx) {
      const auto ba = cell_min_from_index(a, m);
      for (auto b : cy) {
        const auto bb = cell_min_from_index(b, m);
        if (std::abs(ba[0] - bb[0]) <= 4 && std::abs(ba[1] - bb[1]) <= 4) {
          ok = true;
          break;
        }
      }
      if (ok) break;
    }
    if (!ok) return best;
    best = m;
  }
  return best;  // unreachable for distinct points; cap is a safety net
}

}  // namespace carpet
