// Exact linear algebra over F_2 (bit-packed), F_p (dense), Z/p^T (Howell form)
// and Z_(p) (reduced fractions).
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "synss/algebra.hpp"

namespace synss {

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Process-wide memory budget (bytes) for dense matrices; default 2 GiB.
void set_memory_budget(size_t bytes);
size_t memory_budget();
void charge_memory(size_t bytes, const char* what);

// ---------------------------------------------------------------- F_p

class MatrixFp {
 public:
  MatrixFp() = default;
  MatrixFp(int p, size_t rows, size_t cols);
  static MatrixFp identity(int p, size_t n);

  int prime() const { return p_; }
  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  uint32_t get(size_t r, size_t c) const;
  void set(size_t r, size_t c, uint32_t v);
  void add_to(size_t r, size_t c, uint32_t v);

  std::vector<uint32_t> apply(const std::vector<uint32_t>& v) const;
  MatrixFp transpose() const;
  MatrixFp operator*(const MatrixFp& o) const;
  bool is_zero() const;

  // Row-reduced echelon form in place; returns pivot columns.
  std::vector<size_t> rref();

  const uint64_t* row_words(size_t r) const { return &bits_[r * words_]; }
  uint64_t* row_words(size_t r) { return &bits_[r * words_]; }
  size_t words_per_row() const { return words_; }

 private:
  int p_ = 2;
  size_t rows_ = 0, cols_ = 0, words_ = 0;
  std::vector<uint64_t> bits_;   // p = 2
  std::vector<uint32_t> vals_;   // p odd
};

struct RankKernel {
  size_t rank = 0;
  std::vector<std::vector<uint32_t>> kernel;  // basis of {v : M v = 0}
};

RankKernel rank_kernel(const MatrixFp& m);
size_t rank(const MatrixFp& m);
// Some w with M w = b, if one exists.
std::optional<std::vector<uint32_t>> solve(const MatrixFp& m, const std::vector<uint32_t>& b);
// Vectors completing a basis of `sub` to a basis of `space` (both given by spanning rows
// of equal length); their classes form a basis of space/sub.
std::vector<std::vector<uint32_t>> quotient_reps(int p, const std::vector<std::vector<uint32_t>>& sub,
                                                 const std::vector<std::vector<uint32_t>>& space);

// Unpacked reference elimination (oracle for tests).
size_t naive_rank(int p, std::vector<std::vector<uint32_t>> rows);

// ---------------------------------------------------------------- sparse F_2

// Column-sparse F_2 matrix (sorted row indices per column).
struct SparseF2 {
  size_t rows = 0;
  std::vector<std::vector<uint32_t>> cols;
};

// Rank by column reduction with the lowest-one pivot rule.
size_t sparse_rank(const SparseF2& m);

// ---------------------------------------------------------------- Z/p^T

// Arithmetic in Z/p^T with p^T < 2^63.
struct ZpkRing {
  int p;
  int T;
  uint64_t mod;
  ZpkRing(int p, int T);
  uint64_t add(uint64_t a, uint64_t b) const { uint64_t s = a + b; return s >= mod ? s - mod : s; }
  uint64_t sub(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + mod - b; }
  uint64_t mul(uint64_t a, uint64_t b) const {
    if (p == 2) return (a * b) & (mod - 1);  // wraps mod 2^64, a multiple of 2^T
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % mod);
  }
  uint64_t neg(uint64_t a) const { return a ? mod - a : 0; }
  int val(uint64_t a) const;        // p-adic valuation, T for zero
  uint64_t unit_inverse(uint64_t a) const;
  uint64_t pow_p(int k) const;      // p^k, 0 if k >= T
  uint64_t from(const Coefficient& c) const { return c.mod_pk(p, mod); }
};

using ZVec = std::vector<uint64_t>;

// Dense matrix over Z/p^T, row-major.
struct ZpkMatrix {
  size_t rows = 0, cols = 0;
  std::vector<uint64_t> a;
  ZpkMatrix() = default;
  ZpkMatrix(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0) {}
  uint64_t& at(size_t r, size_t c) { return a[r * cols + c]; }
  uint64_t at(size_t r, size_t c) const { return a[r * cols + c]; }
  ZVec apply(const ZpkRing& R, const ZVec& v) const;
};

// Submodule of (Z/p^T)^n kept in Howell form; length = log_p of its order.
class ZpkModule {
 public:
  ZpkModule(const ZpkRing& R, size_t n) : R_(R), n_(n) {}
  static ZpkModule span(const ZpkRing& R, size_t n, std::vector<ZVec> gens);

  size_t ambient() const { return n_; }
  const std::vector<ZVec>& rows() const { return rows_; }
  int length() const;
  bool contains(const ZVec& x) const;
  // Reduce x modulo the module (canonical remainder).
  ZVec reduce(ZVec x) const;
  ZpkModule operator+(const ZpkModule& o) const;
  ZpkModule image(const ZpkMatrix& d) const;
  const ZpkRing& ring() const { return R_; }

 private:
  void howell(std::vector<ZVec> gens);
  ZpkRing R_;
  size_t n_;
  std::vector<ZVec> rows_;
  std::vector<size_t> piv_;
};

// {y : (N y)_i ≡ 0 mod p^{s_i} for all i}, N over Z/p^T.
ZpkModule kernel_mod(const ZpkRing& R, const ZpkMatrix& N, const std::vector<int>& s);

// ---------------------------------------------------------------- Z_(p)

// Fraction-exact matrix over Z_(p); elimination pivots on p-adic units first.
class MatrixLoc {
 public:
  MatrixLoc(int p, size_t rows, size_t cols);
  int prime() const { return p_; }
  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  const Coefficient& get(size_t r, size_t c) const { return a_[r * cols_ + c]; }
  void set(size_t r, size_t c, const Coefficient& v);

  struct Elimination {
    size_t unit_rank = 0;                 // pivots that were p-adic units
    std::vector<int> pivot_valuations;    // valuation of each pivot, in order
    bool unit_pivot_missing = false;      // a nonzero column had no unit pivot
  };
  // Smith-type elimination over Z_(p): at each step pick a pivot of minimal
  // valuation, preferring units; reports non-unit pivots explicitly.
  Elimination eliminate() const;
  ZpkMatrix to_zpk(const ZpkRing& R) const;

 private:
  int p_;
  size_t rows_, cols_;
  std::vector<Coefficient> a_;
};

}  // namespace synss
