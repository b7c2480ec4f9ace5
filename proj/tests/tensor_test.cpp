#include <gtest/gtest.h>

#include <random>

#include "curvident/error.hpp"
#include "curvident/tensor.hpp"

using namespace curvident;

namespace {

Tensor random_tensor(int dim, int rank, std::mt19937_64& rng, double density = 1.0) {
  Tensor t(dim, rank);
  std::uniform_int_distribution<int> val(-4, 4);
  std::bernoulli_distribution keep(density);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (keep(rng)) t[i] = Scalar(Rational(val(rng)), Rational(val(rng), 2));
  }
  return t;
}

}  // namespace

TEST(Tensor, Shape) {
  EXPECT_THROW(Tensor(1, 2), ShapeError);
  EXPECT_THROW(Tensor(7, 2), ShapeError);
  EXPECT_THROW(Tensor(3, 9), ShapeError);
  const Tensor t(4, 3);
  EXPECT_EQ(t.size(), 64u);
  EXPECT_EQ(t.offset({1, 2, 3}), 16u + 8u + 3u);
  EXPECT_EQ(t.multi_index(27), (std::vector<int>{1, 2, 3}));
  EXPECT_THROW(t.offset({1, 2}), ShapeError);
  EXPECT_THROW(t.offset({1, 2, 4}), ShapeError);
  EXPECT_THROW(t.value(), ShapeError);
  EXPECT_EQ(Tensor::scalar(3, Scalar(5)).value(), Scalar(5));
}

TEST(Tensor, EqualityAndZero) {
  const Tensor g = Tensor::metric(3);
  EXPECT_TRUE(is_zero(Tensor(3, 4)));
  EXPECT_TRUE(tensors_equal(g, g));
  EXPECT_FALSE(tensors_equal(g, g * Scalar(2)));
  EXPECT_THROW(tensors_equal(g, Tensor::metric(4)), ShapeError);
  EXPECT_THROW(tensors_equal(g, Tensor(3, 3)), ShapeError);
}

TEST(Tensor, Transpose) {
  std::mt19937_64 rng(3);
  const Tensor t = random_tensor(3, 4, rng);
  const Tensor u = t.transposed({2, 0, 3, 1});
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) EXPECT_EQ(u.at({a, b, c, d}), t.at({b, d, a, c}));
  EXPECT_THROW(t.transposed({0, 0, 1, 2}), ShapeError);
}

TEST(TensorProduct, Examples) {
  const Tensor g = Tensor::metric(2);
  const Tensor gg = tensor_product(g, g);
  EXPECT_EQ(gg.rank(), 4);
  EXPECT_EQ(gg.at({0, 0, 1, 1}), Scalar(1));
  EXPECT_EQ(gg.at({0, 1, 0, 1}), Scalar(0));

  std::mt19937_64 rng(11);
  const Tensor x = random_tensor(3, 2, rng);
  EXPECT_TRUE(is_zero(tensor_product(x, Tensor(3, 2))));
  EXPECT_EQ(tensor_product(x, Tensor(3, 2)).rank(), 4);
  EXPECT_TRUE(tensors_equal(tensor_product(Tensor::scalar(3, Scalar(2)), Tensor::metric(3)), Tensor::metric(3) * Scalar(2)));
  EXPECT_THROW(tensor_product(g, Tensor::metric(3)), ShapeError);
}

TEST(Contract, MetricTrace) {
  const Tensor g = Tensor::metric(5);
  const Tensor t = einsum("ab,ab->", {g, g});
  EXPECT_EQ(t.rank(), 0);
  EXPECT_EQ(t.value(), Scalar(5));
  EXPECT_EQ(einsum("aa->", {g}).value(), Scalar(5));
}

TEST(Contract, SpecErrors) {
  const Tensor g = Tensor::metric(3);
  EXPECT_THROW(einsum("ab,bc", {g, g}), SpecError);
  EXPECT_THROW(einsum("ab,bc->a", {g, g}), SpecError);
  EXPECT_THROW(einsum("ab,bc->ab", {g, g}), SpecError);
  EXPECT_THROW(einsum("ab,bb->ab", {g, g}), SpecError);
  EXPECT_THROW(einsum("ab,bc->ac", {g}), SpecError);
  const Tensor g4 = Tensor::metric(4);
  EXPECT_THROW(einsum("ab,bc->ac", {g, g4}), SpecError);
  ContractionSpec spec;
  spec.free = {{0, 0}};
  EXPECT_THROW(contract(TensorRefs{g}, spec), SpecError);
  spec.free = {{0, 0}, {0, 0}};
  EXPECT_THROW(contract(TensorRefs{g}, spec), SpecError);
  spec.free = {{0, 0}, {0, 2}};
  EXPECT_THROW(contract(TensorRefs{g}, spec), SpecError);
}

// Brute force over all index assignments as the oracle.
TEST(Contract, MatchesBruteForce) {
  std::mt19937_64 rng(5);
  const int dim = 3;
  const Tensor a = random_tensor(dim, 4, rng, 0.6);
  const Tensor b = random_tensor(dim, 3, rng, 0.6);
  const Tensor c = random_tensor(dim, 2, rng);
  const Tensor out = einsum("iabj,bca,ck->jik", {a, b, c});
  ASSERT_EQ(out.rank(), 3);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k) {
        Scalar sum;
        for (int x = 0; x < dim; ++x)
          for (int y = 0; y < dim; ++y)
            for (int z = 0; z < dim; ++z) sum += a.at({i, x, y, j}) * b.at({y, z, x}) * c.at({z, k});
        EXPECT_EQ(out.at({j, i, k}), sum);
      }
}

TEST(Contract, SelfTraceAndOuter) {
  std::mt19937_64 rng(8);
  const Tensor a = random_tensor(4, 4, rng);
  const Tensor b = random_tensor(4, 1, rng);
  const Tensor out = einsum("iaaj,k->kji", {a, b});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        Scalar tr;
        for (int x = 0; x < 4; ++x) tr += a.at({i, x, x, j});
        EXPECT_EQ(out.at({k, j, i}), tr * b.at({k}));
      }
}

TEST(Contract, Multilinear) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor a = random_tensor(4, 4, rng);
    const Tensor b = random_tensor(4, 4, rng);
    const Tensor r = random_tensor(4, 4, rng);
    const Scalar lambda(Rational(-3, 7), Rational(2));
    const Tensor mixed = a + b * lambda;
    const Tensor lhs = einsum("iabc,jcba->ij", {mixed, r});
    Tensor rhs = einsum("iabc,jcba->ij", {a, r});
    rhs.add_scaled(einsum("iabc,jcba->ij", {b, r}), lambda);
    EXPECT_TRUE(tensors_equal(lhs, rhs));
  }
}

TEST(Contract, OrderIndependent) {
  std::mt19937_64 rng(2);
  const Tensor a = random_tensor(3, 2, rng);
  const Tensor b = random_tensor(3, 2, rng);
  const Tensor c = random_tensor(3, 2, rng);
  const Tensor abc = einsum("ij,jk,kl->il", {a, b, c});
  const Tensor ab = einsum("ij,jk->ik", {a, b});
  EXPECT_TRUE(tensors_equal(abc, einsum("ik,kl->il", {ab, c})));
  EXPECT_TRUE(tensors_equal(abc, einsum("kl,jk,ij->il", {c, b, a})));
}
