#include <catch2/catch_amalgamated.hpp>

#include "carpet/poincare.hpp"
#include "oracles.hpp"

using namespace carpet;

TEST_CASE("lambda_star against the p=2 KKT oracle") {
  const PoincareResult r = lambda_star(2, 2.0);
  const CellGraph g2 = build_cell_graph(2, CellAdjacency::kFull);
  ConstraintSpec spec;
  MeanConstraint all;
  for (std::int32_t v = 0; v < 64; ++v) all.subset.push_back(v);
  all.target = 1.0;
  spec.means.push_back(all);
  spec.zero_set.assign(g2.boundary.begin(), g2.boundary.end());
  const auto oracle = test_oracles::dense_mean_constrained_p2(g2.g, spec);
  CHECK(r.value == Catch::Approx(1.0 / test_oracles::energy_p2(g2.g, oracle)).epsilon(1e-8));

  // reciprocal relation and mean constraint on the certificate
  CHECK(r.value * p_energy_raw(g2.g, r.certificate, 2.0) == Catch::Approx(1.0).epsilon(1e-8));
  double mean = 0.0;
  for (double v : r.certificate) mean += v / 64.0;
  CHECK(mean == Catch::Approx(1.0).margin(1e-10));

  // nonnegative certificate, zero on the boundary
  for (double v : r.certificate) CHECK(v >= -1e-9);
  for (auto v : g2.boundary) CHECK(r.certificate[static_cast<size_t>(v)] == 0.0);

  CHECK_THROWS_AS(lambda_star(1, 2.0), std::invalid_argument);
}

TEST_CASE("sigma against the p=2 KKT oracle and its symmetry") {
  const PoincareResult r = sigma(1, 2.0);

  // oracle on the same induced subgraph
  std::vector<std::int64_t> words;
  for (std::int64_t j = 0; j < 8; ++j) words.push_back(j);
  for (std::int64_t j = 0; j < 8; ++j) words.push_back(56 + j);
  const CellGraph sub = build_cell_graph_on(std::move(words), 2, CellAdjacency::kFull);
  ConstraintSpec spec;
  MeanConstraint ma, mb;
  for (std::int32_t v = 0; v < 8; ++v) ma.subset.push_back(v);
  for (std::int32_t v = 8; v < 16; ++v) mb.subset.push_back(v);
  ma.target = 1.0;
  mb.target = 0.0;
  spec.means = {ma, mb};
  const auto oracle = test_oracles::dense_mean_constrained_p2(sub.g, spec);
  CHECK(r.value == Catch::Approx(1.0 / test_oracles::energy_p2(sub.g, oracle)).epsilon(1e-8));
  CHECK(r.value * p_energy_raw(sub.g, r.certificate, 2.0) == Catch::Approx(1.0).epsilon(1e-8));

  // antisymmetry through the block swap iota_{1->8}(1v) = 8 T_h(v):
  // f(iota(w)) = 1 - f(w) up to the affine normalization
  const auto perm8 = symbol_permutation(symmetry("T_h"));
  for (std::int64_t j = 0; j < 8; ++j) {
    const std::int64_t v_img = perm8[static_cast<size_t>(j)] - 1;
    const double f_1v = r.certificate[static_cast<size_t>(j)];
    const double f_8v = r.certificate[static_cast<size_t>(8 + v_img)];
    CHECK(f_1v + f_8v == Catch::Approx(1.0).margin(1e-7));
  }
}

TEST_CASE("sigma is invariant under weight rescaling") {
  // explicit weights c * uniform give the same value
  const std::int64_t block = 8;
  std::vector<std::int64_t> words;
  for (std::int64_t j = 0; j < block; ++j) words.push_back(j);
  for (std::int64_t j = 0; j < block; ++j) words.push_back(7 * block + j);
  const CellGraph sub = build_cell_graph_on(std::move(words), 2, CellAdjacency::kFull);
  for (double scale : {1.0, 16.0}) {
    ConstraintSpec spec;
    MeanConstraint ma, mb;
    for (std::int32_t v = 0; v < 8; ++v) {
      ma.subset.push_back(v);
      ma.weights.push_back(scale);
    }
    for (std::int32_t v = 8; v < 16; ++v) {
      mb.subset.push_back(v);
      mb.weights.push_back(scale);
    }
    ma.target = 1.0;
    mb.target = 0.0;
    spec.means = {ma, mb};
    const SolveReport rep = solve_mean_constrained(sub.g, spec, 2.0);
    CHECK(1.0 / rep.energy == Catch::Approx(sigma(1, 2.0).value).epsilon(1e-8));
  }
}

TEST_CASE("lambda ascent matches the p=2 eigen oracle") {
  SolverOptions opts;
  opts.seed = 2024;
  opts.max_sweeps = 50000;
  for (int n : {1, 2}) {
    const PoincareResult r = lambda(n, 2.0, opts);
    const CellGraph g = build_cell_graph(n, CellAdjacency::kFull);
    const double expect =
        1.0 / (static_cast<double>(pow8(n)) * test_oracles::lambda2_laplacian(g.g));
    CHECK(r.value == Catch::Approx(expect).epsilon(1e-6));
    CHECK(r.is_lower_bound);
    CHECK(r.value > 0.0);
  }
}

TEST_CASE("lambda dominates the zero-extended sigma certificate quotient") {
  // the sup over all functions is at least the quotient of any test function
  const PoincareResult s = sigma(1, 2.0);
  const CellGraph g2 = build_cell_graph(2, CellAdjacency::kFull);
  std::vector<double> f(64, 0.0);
  // certificate lives on {1,8}.W_1; embed by word index
  for (std::int64_t j = 0; j < 8; ++j) f[static_cast<size_t>(j)] = s.certificate[static_cast<size_t>(j)];
  for (std::int64_t j = 0; j < 8; ++j)
    f[static_cast<size_t>(56 + j)] = s.certificate[static_cast<size_t>(8 + j)];
  double mean = 0.0;
  for (double v : f) mean += v / 64.0;
  double num = 0.0;
  for (double v : f) num += std::pow(std::abs(v - mean), 2.0) / 64.0;
  const double quotient = num / p_energy_raw(g2.g, f, 2.0);

  SolverOptions opts;
  opts.seed = 5;
  const PoincareResult l = lambda(2, 2.0, opts);
  CHECK(l.value >= quotient * (1.0 - 1e-9));
}

TEST_CASE("lambda_star below next-level lambda at p = 2") {
  SolverOptions opts;
  opts.seed = 31;
  const double ls2 = lambda_star(2, 2.0).value;
  const double l3 = lambda(3, 2.0, opts).value;
  CHECK(ls2 <= l3 * (1.0 + 1e-6));
}

TEST_CASE("relation table shape and finiteness") {
  const PoincareRelationTable t = relation_table(2, 3, 2.0);
  REQUIRE(t.rows.size() == 2);
  for (const auto& r : t.rows) {
    REQUIRE(r.ok);
    CHECK(r.ratio_lambda_sigma > 0.0);
    CHECK(r.ratio_lstar_lambda > 0.0);
    CHECK(r.product_lambda_clr > 0.0);
    CHECK(std::isfinite(r.ratio_lambda_sigma));
  }
  CHECK(t.spread_lambda_sigma >= 1.0);
  CHECK(t.spread_lstar_lambda >= 1.0);
  CHECK(t.spread_lambda_clr >= 1.0);
  CHECK_THROWS_AS(relation_table(1, 3, 2.0), std::invalid_argument);
}
