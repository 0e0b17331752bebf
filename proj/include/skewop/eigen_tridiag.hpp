#pragma once

#include <vector>

namespace skewop {

// Eigenvalues of a real symmetric tridiagonal matrix, ascending.
// diag has n entries, off has n-1 (off[i] couples i and i+1).
// Implicit-shift QL iteration, eigenvalues only.
std::vector<double> tridiagonal_eigenvalues_ql(std::vector<double> diag,
                                               std::vector<double> off);

// Number of eigenvalues strictly below x (Sturm / LDL^T sign count).
int tridiagonal_count_below(const std::vector<double>& diag,
                            const std::vector<double>& off, double x);

// Bisection eigensolver built on the Sturm count. Slower than QL;
// used as an independent oracle and as a fallback.
std::vector<double> tridiagonal_eigenvalues_bisect(
    const std::vector<double>& diag, const std::vector<double>& off);

// Eigenvalues of a dense real symmetric matrix (row-major n*n entries;
// only the lower triangle is read), ascending. Householder reduction to
// tridiagonal form followed by the QL iteration above.
std::vector<double> dense_symmetric_eigenvalues(std::vector<double> a, int n);

}  // namespace skewop
