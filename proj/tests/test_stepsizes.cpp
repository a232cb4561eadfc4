#include <cmath>

#include "doctest.h"
#include "osgm/stepsizes.hpp"

using namespace osgm;

namespace {

Stepsize random_of_kind(StepKind kind, int n, Rng& rng) {
  switch (kind) {
    case StepKind::Scalar:
      return Stepsize::scalar(rng.normal(), n);
    case StepKind::Diagonal:
      return Stepsize::diagonal(rng.normal_vec(n));
    case StepKind::Full: {
      Mat M(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = rng.normal();
      return Stepsize::full(M);
    }
  }
  return Stepsize{};
}

}  // namespace

TEST_SUITE("stepsizes") {

TEST_CASE("apply matches the parametrization") {
  Vec g(2);
  g << 2.0, 4.0;
  Vec out = Stepsize::scalar(0.5, 2).apply(g);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.0);

  Vec d(2);
  d << 1.0, 0.0;
  Vec g2(2);
  g2 << 3.0, 7.0;
  out = Stepsize::diagonal(d).apply(g2);
  CHECK(out[0] == 3.0);
  CHECK(out[1] == 0.0);

  Mat M(2, 2);
  M << 0.0, 1.0, 1.0, 0.0;
  Vec g3(2);
  g3 << 1.0, 2.0;
  out = Stepsize::full(M).apply(g3);
  CHECK(out[0] == 2.0);
  CHECK(out[1] == 1.0);
}

TEST_CASE("apply rejects mismatched dimensions") {
  Vec g3 = Vec::Ones(3);
  CHECK_THROWS_AS(Stepsize::scalar(0.5, 2).apply(g3), InvalidInput);
  CHECK_THROWS_AS(Stepsize::diagonal(Vec::Ones(2)).apply(g3), InvalidInput);
  CHECK_THROWS_AS(Stepsize::full(Mat::Identity(2, 2)).apply(g3), InvalidInput);
}

TEST_CASE("factories validate their shapes") {
  CHECK_THROWS_AS(Stepsize::scalar(0.5, 0), InvalidParameter);
  CHECK_THROWS_AS(Stepsize::diagonal(Vec(0)), InvalidParameter);
  Mat rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(Stepsize::full(rect), InvalidParameter);
}

TEST_CASE("a scalar embeds as the same map in every parametrization") {
  Rng rng(5);
  Vec g = rng.normal_vec(3);
  auto s = Stepsize::scalar(0.7, 3);
  auto d = Stepsize::scaled_identity(0.7, 3, StepKind::Diagonal);
  auto f = Stepsize::scaled_identity(0.7, 3, StepKind::Full);
  Vec a = s.apply(g), b = d.apply(g), c = f.apply(g);
  CHECK((a - b).lpNorm<Eigen::Infinity>() <= 1e-14);
  CHECK((a - c).lpNorm<Eigen::Infinity>() <= 1e-14);
  CHECK((s.embed() - Mat::Identity(3, 3) * 0.7).norm() == 0.0);
}

TEST_CASE("frobenius norms and inner products honor the embedding") {
  auto s = Stepsize::scalar(0.5, 4);
  CHECK(s.frob_sq() == 4 * 0.25);
  auto s2 = Stepsize::scalar(3.0, 4);
  CHECK(inner(s, s2) == 4 * 0.5 * 3.0);

  Rng rng(6);
  for (auto kind : {StepKind::Scalar, StepKind::Diagonal, StepKind::Full}) {
    auto a = random_of_kind(kind, 4, rng);
    auto b = random_of_kind(kind, 4, rng);
    CHECK(a.frob_sq() ==
          doctest::Approx(a.embed().squaredNorm()).epsilon(1e-12));
    CHECK(inner(a, b) ==
          doctest::Approx((a.embed().transpose() * b.embed()).trace())
              .epsilon(1e-12));
  }
}

TEST_CASE("axpy and minus act entrywise") {
  auto a = Stepsize::scalar(1.0, 2);
  a.axpy(2.0, Stepsize::scalar(0.25, 2));
  CHECK(a.alpha == 1.5);
  auto d = a.minus(Stepsize::scalar(0.5, 2));
  CHECK(d.alpha == 1.0);

  Vec v(2);
  v << 1.0, -2.0;
  auto dg = Stepsize::diagonal(v);
  CHECK(dg.min_entry() == -2.0);
  CHECK(dg.max_entry() == 1.0);
}

TEST_CASE("restricted gradients preserve pairings") {
  Rng rng(7);
  Mat G(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) G(i, j) = rng.normal();
  for (auto kind : {StepKind::Scalar, StepKind::Diagonal, StepKind::Full}) {
    auto grad = restrict_grad(G, kind);
    for (int t = 0; t < 10; ++t) {
      auto dir = random_of_kind(kind, 4, rng);
      double lhs = pair_grad(grad, dir);
      double rhs = (G.transpose() * dir.embed()).trace();
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
  CHECK(restrict_grad(G, StepKind::Scalar).alpha ==
        doctest::Approx(G.trace()).epsilon(1e-14));
}

TEST_CASE("candidate boxes project, contain, and measure") {
  CHECK_THROWS_AS(CandidateSet::box(1.0, 0.0), InvalidParameter);
  auto box = CandidateSet::box(0.0, 1.0);
  auto p = Stepsize::scalar(2.0, 3);
  box.project(p);
  CHECK(p.alpha == 1.0);
  box.project(p);
  CHECK(p.alpha == 1.0);  // idempotent
  CHECK(box.contains(p));
  CHECK_FALSE(box.contains(Stepsize::scalar(1.5, 3)));

  auto un = CandidateSet::unbounded();
  auto q = Stepsize::scalar(99.0, 3);
  un.project(q);
  CHECK(q.alpha == 99.0);
  CHECK(un.contains(q));
  CHECK(std::isinf(un.diameter_frob(3, StepKind::Scalar)));

  auto wide = CandidateSet::box(-1.0, 2.0);
  CHECK(wide.diameter_frob(4, StepKind::Scalar) == 3.0 * 2.0);
  CHECK(wide.diameter_frob(4, StepKind::Diagonal) == 3.0 * 2.0);
  CHECK(wide.diameter_frob(4, StepKind::Full) == 3.0 * 4.0);
}

TEST_CASE("projection onto a box never expands distances") {
  auto box = CandidateSet::box(-0.5, 0.8);
  Rng rng(8);
  for (auto kind : {StepKind::Scalar, StepKind::Diagonal, StepKind::Full}) {
    for (int t = 0; t < 30; ++t) {
      auto a = random_of_kind(kind, 3, rng);
      auto b = random_of_kind(kind, 3, rng);
      double before = a.minus(b).frob_sq();
      box.project(a);
      box.project(b);
      double after = a.minus(b).frob_sq();
      CHECK(after <= before * (1 + 1e-12) + 1e-15);
      CHECK(box.contains(a, 1e-15));
    }
  }
}

TEST_CASE("momentum intervals clamp and measure") {
  CHECK_THROWS_AS(Interval::box(1.0, 0.0), InvalidParameter);
  auto iv = Interval::box(0.0, 1.0);
  CHECK(iv.project(1.5) == 1.0);
  CHECK(iv.project(-0.5) == 0.0);
  CHECK(iv.project(0.5) == 0.5);
  CHECK(iv.diameter() == 1.0);
  auto un = Interval::unbounded();
  CHECK(un.project(42.0) == 42.0);
  CHECK(std::isinf(un.diameter()));
}

TEST_CASE("product norms on stepsize-momentum pairs") {
  double L = 2.0;
  auto zero = Stepsize::scalar(0.0, 3);
  CHECK(product_norm(zero, L, L) == 1.0);
  CHECK(product_dual_norm(zero, L, L) == L * L);
  auto id2 = Stepsize::scaled_identity(1.0, 2, StepKind::Full);
  CHECK(product_norm(id2, 0.0, L) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("the product norms are dual along the pairing") {
  Rng rng(9);
  double L = 3.0;
  for (auto kind : {StepKind::Scalar, StepKind::Diagonal, StepKind::Full}) {
    for (int t = 0; t < 30; ++t) {
      auto P = random_of_kind(kind, 3, rng);
      auto G = random_of_kind(kind, 3, rng);
      double beta = rng.normal();
      double gbeta = rng.normal();
      double pairing = inner(P, G) + beta * gbeta;
      double bound = product_norm(P, beta, L) * product_dual_norm(G, gbeta, L);
      CHECK(std::abs(pairing) <= bound * (1 + 1e-12));
    }
  }
}

TEST_CASE("kind names round-trip") {
  for (auto kind : {StepKind::Scalar, StepKind::Diagonal, StepKind::Full})
    CHECK(step_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(step_kind_from_string("banana"), InvalidParameter);
}

TEST_CASE("zeros_like preserves shape") {
  auto z = Stepsize::zeros_like(Stepsize::diagonal(Vec::Ones(3)));
  CHECK(z.kind == StepKind::Diagonal);
  CHECK(z.n == 3);
  CHECK(z.frob_sq() == 0.0);
}

}  // TEST_SUITE
