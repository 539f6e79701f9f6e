#include <cmath>
#include <random>

#include "doctest.h"
#include "ltwd/hyperbolic.hpp"

using namespace ltwd;

namespace {

HalfSpacePoint make_point(std::initializer_list<double> vals) {
  HalfSpacePoint p;
  p.coords = Eigen::VectorXd(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double v : vals) p.coords(i++) = v;
  return p;
}

// small embedding fixture with hand-chosen unit-norm psi columns
MultiScaleEmbedding hand_embedding() {
  MultiScaleEmbedding emb;
  emb.K_c = 1;
  emb.m = 2;
  Eigen::MatrixXd psi0(2, 2), psi1(2, 2);
  psi0 << 1, 0, 0, 1;  // orthogonal at the finest scale
  const double r = std::sqrt(0.5);
  psi1 << r, r, r, r;  // identical at the coarse scale
  emb.psi = {psi0, psi1};
  return emb;
}

MultiScaleDensities random_densities(Eigen::Index m, int K_c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  MultiScaleDensities dens;
  dens.K_c = K_c;
  for (int k = 0; k <= K_c; ++k) {
    Eigen::MatrixXd M(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) M(i, j) = expo(rng);
      M.col(j) /= M.col(j).sum();
    }
    dens.densities.push_back(M);
  }
  return dens;
}

}  // namespace

TEST_CASE("halfspace distance basics") {
  auto x = make_point({0.0, 1.0});
  auto y = make_point({0.0, std::exp(1.0)});
  // vertical geodesic: ln(e/1) = 1, matching 2*asinh((e-1)/(2*sqrt(e)))
  CHECK(halfspace_distance(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(halfspace_distance(y, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(halfspace_distance(x, x) == 0.0);

  auto a = make_point({0.3, -0.2, 0.7});
  auto b = make_point({-0.1, 0.5, 1.9});
  CHECK(halfspace_distance(a, b) == doctest::Approx(halfspace_distance(b, a)).epsilon(1e-15));
  CHECK_THROWS_AS(halfspace_distance(x, a), std::invalid_argument);
}

TEST_CASE("halfspace distance is invariant to translation and dilation") {
  auto a = make_point({0.3, 0.7});
  auto b = make_point({-0.4, 1.2});
  double d0 = halfspace_distance(a, b);

  auto at = make_point({0.3 + 5.0, 0.7});
  auto bt = make_point({-0.4 + 5.0, 1.2});
  CHECK(halfspace_distance(at, bt) == doctest::Approx(d0).epsilon(1e-12));

  const double c = 3.5;
  auto as = make_point({0.3 * c, 0.7 * c});
  auto bs = make_point({-0.4 * c, 1.2 * c});
  CHECK(halfspace_distance(as, bs) == doctest::Approx(d0).epsilon(1e-12));
}

TEST_CASE("embed takes square roots and stacks scale heights") {
  MultiScaleDensities dens = random_densities(6, 3, 2);
  MultiScaleEmbedding emb = embed(dens);
  REQUIRE(emb.K_c == 3);
  REQUIRE(emb.m == 6);
  REQUIRE(emb.psi.size() == 4);
  for (int k = 0; k <= 3; ++k) {
    for (Eigen::Index j = 0; j < 6; ++j) {
      // psi is the elementwise sqrt of a probability column => unit norm
      CHECK(emb.psi[static_cast<std::size_t>(k)].col(j).norm() ==
            doctest::Approx(1.0).epsilon(1e-12));
      CHECK(emb.psi[static_cast<std::size_t>(k)].col(j).minCoeff() >= 0.0);
      CHECK(emb.psi[static_cast<std::size_t>(k)](0, j) ==
            doctest::Approx(std::sqrt(dens.densities[static_cast<std::size_t>(k)](0, j)))
                .epsilon(1e-14));
      HalfSpacePoint z = emb.point(k, j);
      REQUIRE(z.dim() == 7);
      CHECK(z.height() == std::exp2(0.5 * k - 2.0));
    }
  }
  CHECK(emb.scale_height(0) == 0.25);
  CHECK(emb.scale_height(2) == 0.5);
}

TEST_CASE("lca projection closed form and bounds") {
  auto z1 = make_point({1.0, 0.0, 0.25});
  auto z2 = make_point({0.0, 1.0, 0.25});
  // sqrt(2/4 + 0.0625) = sqrt(0.5625) = 0.75
  CHECK(lca_projection(z1, z2) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(lca_projection(z1, z1) == doctest::Approx(0.25).epsilon(1e-14));

  auto higher = make_point({0.0, 1.0, 0.5});
  CHECK_THROWS_AS(lca_projection(z1, higher), std::invalid_argument);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(-1, 1);
  for (int i = 0; i < 50; ++i) {
    double h = std::abs(unif(rng)) + 0.05;
    auto a = make_point({unif(rng), unif(rng), h});
    auto b = make_point({unif(rng), unif(rng), h});
    CHECK(lca_projection(a, b) >= h);  // never below the shared horosphere
  }
}

TEST_CASE("hyperbolic lca is the geodesic apex and midpoint") {
  auto z1 = make_point({1.0, 0.0, 0.25});
  auto z2 = make_point({0.0, 1.0, 0.25});
  HalfSpacePoint lca = hyperbolic_lca(z1, z2);
  CHECK(lca.coords(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lca.coords(1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lca.height() == doctest::Approx(0.75).epsilon(1e-14));

  // apex of the joining semicircle => equidistant, and on the geodesic
  double d1 = halfspace_distance(lca, z1);
  double d2 = halfspace_distance(lca, z2);
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
  CHECK(d1 + d2 == doctest::Approx(halfspace_distance(z1, z2)).epsilon(1e-12));

  HalfSpacePoint self = hyperbolic_lca(z1, z1);
  CHECK((self.coords - z1.coords).norm() < 1e-15);
}

TEST_CASE("hd lca depth is the log-space geometric mean of projections") {
  MultiScaleEmbedding emb = hand_embedding();
  // scale 0: sqrt(0.5 + 0.0625) = 0.75; scale 1: psi equal -> proj = 2^{-3/2}
  const double p0 = 0.75;
  const double p1 = std::exp2(-1.5);
  CHECK(lca_projection_at(emb, 0, 0, 1) == doctest::Approx(p0).epsilon(1e-14));
  CHECK(lca_projection_at(emb, 1, 0, 1) == doctest::Approx(p1).epsilon(1e-14));
  CHECK(hd_lca_depth(emb, 0, 1) == doctest::Approx(std::sqrt(p0 * p1)).epsilon(1e-13));
  CHECK(hd_lca_depth(emb, 1, 0) == doctest::Approx(hd_lca_depth(emb, 0, 1)).epsilon(1e-15));
  // j = j': every projection collapses to the scale height
  CHECK(hd_lca_depth(emb, 0, 0) ==
        doctest::Approx(std::sqrt(0.25 * p1)).epsilon(1e-13));
}

TEST_CASE("product-manifold distance matches per-scale geodesics") {
  MultiScaleEmbedding emb = hand_embedding();
  // scale 0 diff norm sqrt(2), scale 1 diff 0
  double expected = 2.0 * std::asinh(2.0 * std::sqrt(2.0));
  CHECK(product_manifold_distance(emb, 0, 1) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(product_manifold_distance(emb, 0, 0) == 0.0);

  // equals the sum of halfspace distances of the stacked points
  MultiScaleEmbedding r = embed(random_densities(5, 4, 11));
  for (Eigen::Index j = 0; j < 5; ++j)
    for (Eigen::Index j2 = 0; j2 < 5; ++j2) {
      double direct = 0;
      for (int k = 0; k <= r.K_c; ++k)
        direct += halfspace_distance(r.point(k, j), r.point(k, j2));
      CHECK(product_manifold_distance(r, j, j2) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("product-manifold distance is a metric on random embeddings") {
  MultiScaleEmbedding emb = embed(random_densities(7, 3, 23));
  for (Eigen::Index a = 0; a < 7; ++a)
    for (Eigen::Index b = 0; b < 7; ++b) {
      double dab = product_manifold_distance(emb, a, b);
      CHECK(dab == doctest::Approx(product_manifold_distance(emb, b, a)).epsilon(1e-15));
      if (a != b) CHECK(dab > 0);
      for (Eigen::Index c = 0; c < 7; ++c)
        CHECK(dab <= product_manifold_distance(emb, a, c) +
                         product_manifold_distance(emb, c, b) + 1e-10);
    }
}

TEST_CASE("coarser scales shrink the lca gap on tree-structured embeddings") {
  // as diffusion mixes, psi columns approach each other, so the distance
  // from a point to the pair's lca cannot grow with k
  MultiScaleDensities dens;
  dens.K_c = 3;
  Eigen::MatrixXd base(3, 3);
  base << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  for (int k = 0; k <= 3; ++k) {
    // mix each column toward uniform as k grows
    double w = static_cast<double>(k) / 4.0;
    Eigen::MatrixXd M = (1 - w) * base + w * Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0);
    dens.densities.push_back(M);
  }
  MultiScaleEmbedding emb = embed(dens);
  for (Eigen::Index j = 0; j < 3; ++j)
    for (Eigen::Index j2 = 0; j2 < 3; ++j2) {
      if (j == j2) continue;
      for (int k = 0; k < 3; ++k) {
        HalfSpacePoint zk = emb.point(k, j);
        HalfSpacePoint zk1 = emb.point(k + 1, j);
        double dk = halfspace_distance(hyperbolic_lca(zk, emb.point(k, j2)), zk);
        double dk1 = halfspace_distance(hyperbolic_lca(zk1, emb.point(k + 1, j2)), zk1);
        CHECK(dk1 <= dk + 1e-9);
      }
    }
}
