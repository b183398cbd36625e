#include "pbwdem/exactlat.hpp"

#include <algorithm>
#include <cassert>

namespace pbwdem {

SparseVec SparseVec::unit(int idx, Int c) {
  SparseVec v;
  if (c != 0) v.t.emplace_back(idx, std::move(c));
  return v;
}

SparseVec SparseVec::from_dense(const std::vector<Int>& d) {
  SparseVec v;
  for (int i = 0; i < static_cast<int>(d.size()); ++i)
    if (d[i] != 0) v.t.emplace_back(i, d[i]);
  return v;
}

Int SparseVec::coeff(int idx) const {
  auto it = std::lower_bound(
      t.begin(), t.end(), idx,
      [](const std::pair<int, Int>& e, int i) { return e.first < i; });
  if (it != t.end() && it->first == idx) return it->second;
  return 0;
}

void SparseVec::scale(const Int& c) {
  if (c == 0) {
    t.clear();
    return;
  }
  if (c == 1) return;
  for (auto& e : t) e.second *= c;
}

void SparseVec::negate() {
  for (auto& e : t) e.second = -e.second;
}

std::vector<Int> SparseVec::dense(int n) const {
  std::vector<Int> d(n, 0);
  for (auto& e : t) d[e.first] = e.second;
  return d;
}

void axpy(SparseVec& dst, const SparseVec& src, const Int& c) {
  if (c == 0 || src.t.empty()) return;
  std::vector<std::pair<int, Int>> out;
  out.reserve(dst.t.size() + src.t.size());
  auto a = dst.t.begin(), ae = dst.t.end();
  auto b = src.t.begin(), be = src.t.end();
  while (a != ae || b != be) {
    if (b == be || (a != ae && a->first < b->first)) {
      out.push_back(*a++);
    } else if (a == ae || b->first < a->first) {
      Int v = c * b->second;
      if (v != 0) out.emplace_back(b->first, std::move(v));
      ++b;
    } else {
      Int v = a->second + c * b->second;
      if (v != 0) out.emplace_back(a->first, std::move(v));
      ++a;
      ++b;
    }
  }
  dst.t = std::move(out);
}

ExactMatrix ExactMatrix::identity(int n) {
  ExactMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.row[i] = SparseVec::unit(i);
  return m;
}

void ExactMatrix::set(int i, int j, Int v) {
  auto& r = row[i].t;
  auto it = std::lower_bound(
      r.begin(), r.end(), j,
      [](const std::pair<int, Int>& e, int c) { return e.first < c; });
  if (it != r.end() && it->first == j) {
    if (v == 0)
      r.erase(it);
    else
      it->second = std::move(v);
  } else if (v != 0) {
    r.insert(it, {j, std::move(v)});
  }
}

void ExactMatrix::add_to(int i, int j, const Int& v) {
  if (v == 0) return;
  set(i, j, entry(i, j) + v);
}

bool ExactMatrix::is_zero() const {
  for (auto& r : row)
    if (!r.zero()) return false;
  return true;
}

ExactMatrix ExactMatrix::mul(const ExactMatrix& o) const {
  if (cols != o.rows) throw domain_error("matrix dimension mismatch in mul");
  ExactMatrix out(rows, o.cols);
  for (int i = 0; i < rows; ++i)
    for (auto& [k, v] : row[i].t) axpy(out.row[i], o.row[k], v);
  return out;
}

ExactMatrix ExactMatrix::add(const ExactMatrix& o, const Int& c) const {
  if (rows != o.rows || cols != o.cols)
    throw domain_error("matrix dimension mismatch in add");
  ExactMatrix out = *this;
  for (int i = 0; i < rows; ++i) axpy(out.row[i], o.row[i], c);
  return out;
}

ExactMatrix ExactMatrix::transpose() const {
  ExactMatrix out(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (auto& [j, v] : row[i].t) out.row[j].t.emplace_back(i, v);
  return out;
}

SparseVec ExactMatrix::apply(const SparseVec& v) const {
  SparseVec out;
  for (auto& [i, c] : v.t) {
    if (i >= rows) throw domain_error("vector/matrix dimension mismatch");
    axpy(out, row[i], c);
  }
  return out;
}

bool ExactMatrix::operator==(const ExactMatrix& o) const {
  return rows == o.rows && cols == o.cols && row == o.row;
}

ExactMatrix commutator(const ExactMatrix& a, const ExactMatrix& b) {
  return a.mul(b).add(b.mul(a), -1);
}

ExactMatrix divided_power(const ExactMatrix& x, int m) {
  if (m < 0) throw domain_error("negative divided power");
  if (x.rows != x.cols) throw domain_error("divided power of non-square");
  if (m == 0) return ExactMatrix::identity(x.rows);
  ExactMatrix p = x;
  for (int i = 2; i <= m; ++i) p = p.mul(x);
  Int f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  if (f == 1) return p;
  for (auto& r : p.row)
    for (auto& [j, v] : r.t) {
      if (!mpz_divisible_p(v.get_mpz_t(), f.get_mpz_t()))
        throw integrality_error("divided power not integral");
      mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), f.get_mpz_t());
    }
  return p;
}

namespace {

// g = u*a + w*b
void xgcd(const Int& a, const Int& b, Int& g, Int& u, Int& w) {
  mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), w.get_mpz_t(), a.get_mpz_t(),
             b.get_mpz_t());
}

Int fdiv(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

bool Lattice::add_row(SparseVec v) {
  bool changed = false;
  size_t i = 0;
  while (!v.zero()) {
    int p = v.pivot();
    while (i < rows_.size() && rows_[i].pivot() < p) ++i;
    if (i == rows_.size() || rows_[i].pivot() > p) {
      if (v.pivot_val() < 0) v.negate();
      if (v.pivot() >= ambient_) throw domain_error("vector exceeds ambient");
      rows_.insert(rows_.begin() + i, std::move(v));
      canonical_ = false;
      return true;
    }
    const Int& a = rows_[i].pivot_val();
    const Int& b = v.pivot_val();
    if (mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t())) {
      Int q;
      mpz_divexact(q.get_mpz_t(), b.get_mpz_t(), a.get_mpz_t());
      axpy(v, rows_[i], -q);
    } else {
      Int g, u, w;
      xgcd(a, b, g, u, w);
      SparseVec comb;
      axpy(comb, rows_[i], u);
      axpy(comb, v, w);
      Int bg, ag;
      mpz_divexact(bg.get_mpz_t(), b.get_mpz_t(), g.get_mpz_t());
      mpz_divexact(ag.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
      SparseVec rest = v;
      rest.scale(ag);
      axpy(rest, rows_[i], -bg);
      rows_[i] = std::move(comb);
      v = std::move(rest);
      changed = true;
      canonical_ = false;
    }
  }
  return changed;
}

void Lattice::canonicalize() {
  if (canonical_) return;
  for (int i = static_cast<int>(rows_.size()) - 1; i >= 0; --i) {
    if (rows_[i].pivot_val() < 0) rows_[i].negate();
    const Int& p = rows_[i].pivot_val();
    int pc = rows_[i].pivot();
    for (int j = 0; j < i; ++j) {
      Int c = rows_[j].coeff(pc);
      if (c == 0) continue;
      Int q = fdiv(c, p);
      if (q != 0) axpy(rows_[j], rows_[i], -q);
    }
  }
  canonical_ = true;
}

SparseVec Lattice::reduce(SparseVec v, std::vector<Int>* coeffs) const {
  if (coeffs) coeffs->assign(rows_.size(), 0);
  size_t i = 0;
  while (!v.zero() && i < rows_.size()) {
    int p = v.pivot();
    while (i < rows_.size() && rows_[i].pivot() < p) ++i;
    if (i == rows_.size() || rows_[i].pivot() > p) break;
    const Int& a = rows_[i].pivot_val();
    const Int& b = v.pivot_val();
    if (!mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t())) break;
    Int q;
    mpz_divexact(q.get_mpz_t(), b.get_mpz_t(), a.get_mpz_t());
    axpy(v, rows_[i], -q);
    if (coeffs) (*coeffs)[i] = q;
  }
  return v;
}

bool Lattice::member(const SparseVec& v) const {
  return reduce(v, nullptr).zero();
}

std::optional<std::vector<Int>> Lattice::coords(const SparseVec& v) const {
  std::vector<Int> c;
  if (!reduce(v, &c).zero()) return std::nullopt;
  return c;
}

bool Lattice::operator==(const Lattice& o) const {
  if (ambient_ != o.ambient_) return false;
  Lattice a = *this, b = o;
  a.canonicalize();
  b.canonicalize();
  return a.rows_ == b.rows_;
}

Lattice Lattice::span(int ambient_dim, const std::vector<SparseVec>& gens) {
  Lattice l(ambient_dim);
  for (auto& g : gens) l.add_row(g);
  l.canonicalize();
  return l;
}

Lattice Lattice::sum(const Lattice& o) const {
  if (ambient_ != o.ambient_) throw domain_error("ambient mismatch in sum");
  Lattice l = *this;
  for (auto& r : o.rows_) l.add_row(r);
  l.canonicalize();
  return l;
}

Lattice hnf(const std::vector<SparseVec>& gens, int ambient_dim) {
  return Lattice::span(ambient_dim, gens);
}

Lattice kernel_of_rows(const std::vector<SparseVec>& rows, int width) {
  int m = static_cast<int>(rows.size());
  Lattice aug(width + m);
  for (int i = 0; i < m; ++i) {
    SparseVec r = rows[i];
    r.t.emplace_back(width + i, 1);
    aug.add_row(std::move(r));
  }
  Lattice ker(m);
  for (auto& r : aug.basis()) {
    if (r.zero() || r.pivot() < width) continue;
    SparseVec z;
    for (auto& [j, v] : r.t) z.t.emplace_back(j - width, v);
    ker.add_row(std::move(z));
  }
  ker.canonicalize();
  return ker;
}

Lattice Lattice::saturate() const {
  // Right kernel K = { x : B x = 0 } via the left kernel of B^T, then the
  // saturation is the left kernel of the matrix with columns K.
  std::vector<SparseVec> bt(ambient_);
  for (int i = 0; i < rank(); ++i)
    for (auto& [j, v] : rows_[i].t) bt[j].t.emplace_back(i, v);
  Lattice rker = kernel_of_rows(bt, rank());  // in Z^{ambient}
  std::vector<SparseVec> ktt(ambient_);
  for (int i = 0; i < rker.rank(); ++i)
    for (auto& [j, v] : rker.basis()[i].t) ktt[j].t.emplace_back(i, v);
  return kernel_of_rows(ktt, rker.rank());  // in Z^{ambient}
}

namespace {

struct DenseMat {
  int r = 0, c = 0;
  std::vector<std::vector<Int>> a;
  DenseMat(int r_, int c_) : r(r_), c(c_), a(r_, std::vector<Int>(c_, 0)) {}
};

// Straight SNF on a dense matrix; optional mirror applies the inverse column
// operations to an auxiliary list of basis rows (see snf_align).
std::vector<Int> snf_dense(DenseMat m, std::vector<SparseVec>* mirror) {
  auto col_axpy = [&](int j, int i, const Int& k) {
    // col_j += k * col_i
    for (int t = 0; t < m.r; ++t) m.a[t][j] += k * m.a[t][i];
    if (mirror) axpy((*mirror)[i], (*mirror)[j], -k);
  };
  auto col_swap = [&](int i, int j) {
    for (int t = 0; t < m.r; ++t) std::swap(m.a[t][i], m.a[t][j]);
    if (mirror) std::swap((*mirror)[i], (*mirror)[j]);
  };
  auto col_neg = [&](int i) {
    for (int t = 0; t < m.r; ++t) m.a[t][i] = -m.a[t][i];
    if (mirror) (*mirror)[i].negate();
  };
  auto row_axpy = [&](int j, int i, const Int& k) {
    for (int t = 0; t < m.c; ++t) m.a[j][t] += k * m.a[i][t];
  };

  int n = std::min(m.r, m.c);
  std::vector<Int> div;
  for (int t = 0; t < n; ++t) {
    // find smallest nonzero entry in the trailing block
    int pi = -1, pj = -1;
    for (int i = t; i < m.r; ++i)
      for (int j = t; j < m.c; ++j)
        if (m.a[i][j] != 0 &&
            (pi < 0 || mpz_cmpabs(m.a[i][j].get_mpz_t(),
                                  m.a[pi][pj].get_mpz_t()) < 0)) {
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    if (pi != t) std::swap(m.a[pi], m.a[t]);
    if (pj != t) col_swap(pj, t);
    bool again = true;
    while (again) {
      again = false;
      for (int i = t + 1; i < m.r; ++i) {
        if (m.a[i][t] == 0) continue;
        Int q = m.a[i][t] / m.a[t][t];
        row_axpy(i, t, -q);
        if (m.a[i][t] != 0) {
          std::swap(m.a[i], m.a[t]);
          again = true;
        }
      }
      for (int j = t + 1; j < m.c; ++j) {
        if (m.a[t][j] == 0) continue;
        Int q = m.a[t][j] / m.a[t][t];
        col_axpy(j, t, -q);
        if (m.a[t][j] != 0) {
          col_swap(j, t);
          again = true;
        }
      }
    }
    if (m.a[t][t] < 0) col_neg(t);
    div.push_back(m.a[t][t]);
  }
  // enforce divisibility chain
  bool fixed = true;
  while (fixed) {
    fixed = false;
    for (size_t i = 0; i + 1 < div.size(); ++i) {
      if (div[i + 1] % div[i] != 0) {
        Int g, u, w;
        xgcd(div[i], div[i + 1], g, u, w);
        Int l = div[i] / g * div[i + 1];
        // mirror the 2x2 basis change on the auxiliary rows: with
        // sub = d_i b_i + d_{i+1} b_{i+1} spans, replacing (d_i, d_{i+1})
        // by (g, lcm) corresponds to b_i' = u b_i + w b_{i+1},
        // b_{i+1}' chosen unimodularly; a direct construction:
        if (mirror) {
          SparseVec bi = (*mirror)[i], bj = (*mirror)[i + 1];
          // [g]   [u            w          ] [d_i b_i ]
          // basis change matrix V with det 1 mapping (b_i,b_j):
          // new_b_i = u*b_i + w*b_j ; new_b_j = -(d_{i+1}/g)*b_i + (d_i/g)*b_j
          Int di_g = div[i] / g, dj_g = div[i + 1] / g;
          SparseVec nbi, nbj;
          axpy(nbi, bi, u);
          axpy(nbi, bj, w);
          axpy(nbj, bi, -dj_g);
          axpy(nbj, bj, di_g);
          (*mirror)[i] = std::move(nbi);
          (*mirror)[i + 1] = std::move(nbj);
        }
        div[i] = g;
        div[i + 1] = l;
        fixed = true;
      }
    }
  }
  return div;
}

}  // namespace

std::vector<Int> snf_divisors(const ExactMatrix& m) {
  DenseMat d(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (auto& [j, v] : m.row[i].t) d.a[i][j] = v;
  auto div = snf_dense(std::move(d), nullptr);
  std::vector<Int> out;
  for (auto& x : div)
    if (x != 0) out.push_back(x);
  return out;
}

SnfAlignment snf_align(const Lattice& sub, const Lattice& sup) {
  if (sub.ambient() != sup.ambient())
    throw domain_error("ambient mismatch in snf_align");
  DenseMat c(sub.rank(), sup.rank());
  for (int i = 0; i < sub.rank(); ++i) {
    auto co = sup.coords(sub.basis()[i]);
    if (!co) throw domain_error("snf_align: sub not contained in sup");
    for (int j = 0; j < sup.rank(); ++j) c.a[i][j] = (*co)[j];
  }
  SnfAlignment out;
  out.sup_basis = sup.basis();
  out.divisors = snf_dense(std::move(c), &out.sup_basis);
  if (static_cast<int>(out.divisors.size()) != sub.rank())
    throw construction_error("snf_align: sub basis not independent");
  return out;
}

std::vector<Int> quotient_divisors(const Lattice& sub, const Lattice& sup) {
  return snf_align(sub, sup).divisors;
}

int quotient_rank_mod_p(const std::vector<Int>& divisors, int free_rank,
                        long p) {
  if (!is_prime_or_zero(p)) throw domain_error("p must be prime or 0");
  if (p == 0) return free_rank;
  int r = free_rank;
  for (auto& d : divisors)
    if (d != 1 && mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(p)))
      ++r;
  return r;
}

bool is_prime_or_zero(long p) {
  if (p == 0) return true;
  if (p < 2) return false;
  Int v = static_cast<long>(p);
  return mpz_probab_prime_p(v.get_mpz_t(), 30) > 0;
}

}  // namespace pbwdem
