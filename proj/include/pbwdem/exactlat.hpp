#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pbwdem {

using Int = mpz_class;

struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& m) : std::runtime_error(m) {}
};
struct integrality_error : std::runtime_error {
  explicit integrality_error(const std::string& m) : std::runtime_error(m) {}
};
struct construction_error : std::runtime_error {
  explicit construction_error(const std::string& m) : std::runtime_error(m) {}
};
struct budget_error : std::runtime_error {
  explicit budget_error(const std::string& m) : std::runtime_error(m) {}
};

/// Sparse integer vector: terms sorted by index, no zero entries.
class SparseVec {
 public:
  std::vector<std::pair<int, Int>> t;

  SparseVec() = default;
  static SparseVec unit(int idx, Int c = 1);
  static SparseVec from_dense(const std::vector<Int>& d);

  bool zero() const { return t.empty(); }
  int pivot() const { return t.front().first; }
  const Int& pivot_val() const { return t.front().second; }
  int nnz() const { return static_cast<int>(t.size()); }

  Int coeff(int idx) const;
  void scale(const Int& c);
  void negate();
  std::vector<Int> dense(int n) const;

  bool operator==(const SparseVec& o) const { return t == o.t; }
};

/// dst += c * src
void axpy(SparseVec& dst, const SparseVec& src, const Int& c);

/// Sparse integer matrix, row-major.
class ExactMatrix {
 public:
  int rows = 0, cols = 0;
  std::vector<SparseVec> row;

  ExactMatrix() = default;
  ExactMatrix(int r, int c) : rows(r), cols(c), row(r) {}
  static ExactMatrix identity(int n);

  const Int entry(int i, int j) const { return row[i].coeff(j); }
  void set(int i, int j, Int v);
  void add_to(int i, int j, const Int& v);

  bool is_zero() const;
  ExactMatrix mul(const ExactMatrix& o) const;
  ExactMatrix add(const ExactMatrix& o, const Int& c = 1) const;
  ExactMatrix transpose() const;
  SparseVec apply(const SparseVec& v) const;  // v treated as row vector: v * M

  bool operator==(const ExactMatrix& o) const;
};

/// [a, b] = a*b - b*a
ExactMatrix commutator(const ExactMatrix& a, const ExactMatrix& b);

/// X^m / m! with exact divisibility enforced; throws integrality_error.
ExactMatrix divided_power(const ExactMatrix& x, int m);

/// Sublattice of Z^N kept in row-style Hermite normal form: pivot columns
/// strictly increasing, pivots positive, entries above a pivot reduced into
/// [0, pivot). Equality of lattices is equality of representations.
class Lattice {
 public:
  explicit Lattice(int ambient_dim = 0) : ambient_(ambient_dim) {}

  int ambient() const { return ambient_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  const std::vector<SparseVec>& basis() const { return rows_; }

  /// Inserts a vector; returns true if the lattice grew. Canonical form is
  /// restored lazily (see canonicalize).
  bool add_row(SparseVec v);
  void canonicalize();
  bool canonical() const { return canonical_; }

  bool member(const SparseVec& v) const;
  /// Coefficients of v in terms of basis(); nullopt if not a member.
  std::optional<std::vector<Int>> coords(const SparseVec& v) const;

  bool operator==(const Lattice& o) const;

  static Lattice span(int ambient_dim, const std::vector<SparseVec>& gens);
  Lattice sum(const Lattice& o) const;
  Lattice saturate() const;

 private:
  int ambient_;
  std::vector<SparseVec> rows_;
  bool canonical_ = true;

  // reduces v against rows_, returns residue
  SparseVec reduce(SparseVec v, std::vector<Int>* coeffs) const;
};

/// Canonical HNF lattice generated by the given vectors.
Lattice hnf(const std::vector<SparseVec>& gens, int ambient_dim);

/// Left kernel { z : sum_i z_i rows[i] = 0 } as a lattice in Z^{#rows}.
Lattice kernel_of_rows(const std::vector<SparseVec>& rows, int width);

/// Nonzero elementary divisors d1 | d2 | ... of an integer matrix.
std::vector<Int> snf_divisors(const ExactMatrix& m);

/// Result of aligning a sublattice inside a superlattice: sup has a basis
/// b'_1..b'_r with sub = span { d_i b'_i : i <= rank(sub) }.
struct SnfAlignment {
  std::vector<Int> divisors;          // size rank(sub)
  std::vector<SparseVec> sup_basis;   // size rank(sup), aligned order
};

/// Requires sub subset of sup (same ambient); throws domain_error otherwise.
SnfAlignment snf_align(const Lattice& sub, const Lattice& sup);

/// SNF divisors of sub inside sup (all 1 iff sup/sub free and sub a summand).
std::vector<Int> quotient_divisors(const Lattice& sub, const Lattice& sup);

/// Rank over F_p (p prime) or Q (p = 0) of quotient sup/sub given its
/// divisors and free rank. free_rank = rank(sup) - rank(sub).
int quotient_rank_mod_p(const std::vector<Int>& divisors, int free_rank,
                        long p);

bool is_prime_or_zero(long p);

}  // namespace pbwdem
