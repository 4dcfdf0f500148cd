#include <random>

#include "doctest.h"
#include "synss/linf2.hpp"

using namespace synss;

namespace {

MatrixFp random_matrix(std::mt19937_64& rng, int p, size_t r, size_t c, double density = 0.5) {
  MatrixFp m(p, r, c);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<uint32_t> v(1, p - 1);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j)
      if (u(rng) < density) m.set(i, j, v(rng));
  return m;
}

std::vector<std::vector<uint32_t>> rows_of(const MatrixFp& m) {
  std::vector<std::vector<uint32_t>> out(m.rows(), std::vector<uint32_t>(m.cols()));
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) out[i][j] = m.get(i, j);
  return out;
}

bool is_zero(const std::vector<uint32_t>& v) {
  return std::all_of(v.begin(), v.end(), [](uint32_t x) { return x == 0; });
}

}  // namespace

TEST_CASE("identity and zero") {
  auto id = MatrixFp::identity(2, 3);
  auto rk = rank_kernel(id);
  CHECK(rk.rank == 3);
  CHECK(rk.kernel.empty());
  MatrixFp z(2, 2, 5);
  rk = rank_kernel(z);
  CHECK(rk.rank == 0);
  CHECK(rk.kernel.size() == 5);
}

TEST_CASE("64x64 packed rank equals naive elimination") {
  std::mt19937_64 rng(64);
  for (int k = 0; k < 20; ++k) {
    auto m = random_matrix(rng, 2, 64, 64, k % 2 ? 0.1 : 0.5);
    CHECK(rank(m) == naive_rank(2, rows_of(m)));
  }
}

TEST_CASE("kernel vectors are annihilated, rank + nullity = cols") {
  std::mt19937_64 rng(7);
  for (int p : {2, 3, 5}) {
    for (int k = 0; k < 30; ++k) {
      size_t r = 1 + rng() % 40, c = 1 + rng() % 90;
      auto m = random_matrix(rng, p, r, c, 0.3);
      auto rk = rank_kernel(m);
      CHECK(rk.rank + rk.kernel.size() == c);
      for (auto& v : rk.kernel) CHECK(is_zero(m.apply(v)));
      CHECK(rk.rank == naive_rank(p, rows_of(m)));
    }
  }
}

TEST_CASE("solve finds witnesses for consistent systems and rejects others") {
  std::mt19937_64 rng(11);
  for (int p : {2, 3}) {
    for (int k = 0; k < 40; ++k) {
      size_t r = 1 + rng() % 30, c = 1 + rng() % 30;
      auto m = random_matrix(rng, p, r, c, 0.3);
      std::vector<uint32_t> v(c);
      for (auto& x : v) x = rng() % p;
      auto b = m.apply(v);
      auto w = solve(m, b);
      REQUIRE(w.has_value());
      CHECK(m.apply(*w) == b);
    }
  }
  MatrixFp m(2, 2, 1);
  m.set(0, 0, 1);
  CHECK(!solve(m, {0, 1}).has_value());
}

TEST_CASE("quotient representatives complete a basis") {
  std::vector<std::vector<uint32_t>> sub{{1, 1, 0, 0}};
  std::vector<std::vector<uint32_t>> space{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}};
  auto q = quotient_reps(2, sub, space);
  CHECK(q.size() == 2);
  auto all = sub;
  all.insert(all.end(), q.begin(), q.end());
  CHECK(naive_rank(2, all) == 3);
}

TEST_CASE("sparse rank agrees with dense") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    size_t r = 1 + rng() % 60, c = 1 + rng() % 60;
    auto m = random_matrix(rng, 2, r, c, 0.08);
    SparseF2 s;
    s.rows = r;
    s.cols.resize(c);
    for (size_t j = 0; j < c; ++j)
      for (size_t i = 0; i < r; ++i)
        if (m.get(i, j)) s.cols[j].push_back(static_cast<uint32_t>(i));
    CHECK(sparse_rank(s) == rank(m));
  }
}

TEST_CASE("Z/p^T modules") {
  ZpkRing R(2, 4);
  CHECK(R.mod == 16);
  CHECK(R.val(8) == 3);
  CHECK(R.val(0) == 4);
  CHECK(R.mul(R.unit_inverse(3), 3) == 1);
  auto M = ZpkModule::span(R, 2, {{2, 0}, {0, 4}});
  CHECK(M.length() == 3 + 2);
  CHECK(M.contains({6, 12}));
  CHECK(!M.contains({1, 0}));
  // kernel of multiplication by 2 mod 2^1: everything
  ZpkMatrix N(1, 1);
  N.at(0, 0) = 2;
  CHECK(kernel_mod(R, N, {1}).length() == 4);
  CHECK(kernel_mod(R, N, {4}).length() == 1);  // {8, 0}
}

TEST_CASE("Z_(p) elimination prefers unit pivots and reports their absence") {
  MatrixLoc m(2, 2, 2);
  m.set(0, 0, 2);
  m.set(0, 1, 1);
  m.set(1, 0, 4);
  m.set(1, 1, Coefficient(mpz_class(1), mpz_class(3)));
  auto e = m.eliminate();
  CHECK(e.unit_rank >= 1);
  CHECK(e.pivot_valuations.front() == 0);
  MatrixLoc d(2, 2, 1);
  d.set(0, 0, 2);
  d.set(1, 0, 6);
  auto e2 = d.eliminate();
  CHECK(e2.unit_rank == 0);
  CHECK(e2.unit_pivot_missing);
  CHECK(e2.pivot_valuations == std::vector<int>{1});
}

TEST_CASE("memory budget is enforced") {
  auto old = memory_budget();
  set_memory_budget(1 << 10);
  CHECK_THROWS_AS(MatrixFp(2, 4096, 4096), ResourceError);
  set_memory_budget(old);
}
