#pragma once

#include <string>
#include <vector>

#include "skewop/sopfamily.hpp"

namespace skewop {

// Dense M x M truncation of one of the semi-infinite operator matrices
//   Q: multiplication by x in the quasi-function basis,
//   P: the derivative-type operator pairing the two bases,
//   R: multiplication by x combined with P.
// Entries are computed row by row from exact pairing integrals, so every
// stored entry is free of truncation error; truncation only matters when
// matrices are multiplied. The window [window_lo, window_hi] marks the rows
// and columns on which products of these truncations are still exact, with a
// safety margin of bw_margin = 2 (d + 2) indices on each side.
struct BandedOperator {
  char name = '?';
  int beta = 0;
  int M = 0;
  // number of nonzero diagonals above the main one (Q: 1, P: d, R: d+1)
  int upper_bandwidth = -1;
  int bw_margin = 0;
  std::vector<Real> a;  // row-major M x M

  Real& at(int n, int m) { return a[static_cast<size_t>(n) * M + m]; }
  const Real& at(int n, int m) const {
    return a[static_cast<size_t>(n) * M + m];
  }

  int window_lo() const { return bw_margin; }
  int window_hi() const { return M - 1 - bw_margin; }

  // JSON document with name, beta, trunc_size, bandwidth metadata, and all
  // entries as decimal strings
  std::string serialize() const;
};

// Single matrix entry computed from the pairing integrals (op is 'Q', 'P' or
// 'R'). Row n and column m only need the family to extend past both indices,
// so far entries can be probed without building a whole matrix.
Real operator_entry(const SopFamily& fam, const SkewProducts& sp, char op,
                    int n, int m);

// Dense truncations; requires M even and M + 2 (d + 2) <= fam.n_max().
BandedOperator build_Q(const SopFamily& fam, const SkewProducts& sp, int M);
BandedOperator build_P(const SopFamily& fam, const SkewProducts& sp, int M);
BandedOperator build_R(const SopFamily& fam, const SkewProducts& sp, int M);

// The duality transform A -> -Z A^t Z with Z the block-diagonal matrix of
// 2 x 2 units [[0, 1], [-1, 0]]. Requires even truncation size. P and R are
// anti-self-dual; Q satisfies Q = dual(Q) + P^{-1}.
BandedOperator dual(const BandedOperator& A);

// Residual report for the algebraic relations between Q, P and R. Residuals
// are max-abs entries over the safety window, relative to the scale of the
// matrices entering each relation.
struct IdentityReport {
  struct Item {
    std::string name;
    double residual = 0.0;   // relative to scale
    double tolerance = 0.0;
    bool pass = false;
  };
  std::vector<Item> items;
  bool all_pass = true;

  std::string serialize() const;  // JSON array of {identity, residual, pass}
};

// Checks, over the safety window:
//   [Q, P] = 1                   (canonical commutation)
//   [R, P] = P
//   P + dual(P) = 0, R + dual(R) = 0
//   P + V'(Q) strictly lower triangular
//   R + Q V'(Q) lower triangular including the diagonal
//   (Q - dual(Q)) P = +1 (beta=4) or -1 (beta=1), i.e. Q - dual(Q) is the
//       (signed) inverse of P; checked multiplicatively because inverting
//       the truncated block is contaminated by edge effects
// plus the band-structure bounds above the diagonal for Q, P and R.
IdentityReport check_identities(const BandedOperator& Q,
                                const BandedOperator& P,
                                const BandedOperator& R, const Potential& pot);

// Gauge vector (one entry per pair, all but index N-1 zero) that cancels the
// R entry straddling position 2N, i.e. makes R_{2N-1,2N} of the gauged
// family vanish. Even potentials already have it zero.
std::vector<Real> cancel_gauge(const SopFamily& fam, const SkewProducts& sp,
                               int N);

}  // namespace skewop
