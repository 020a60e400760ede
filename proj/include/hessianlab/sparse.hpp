#pragma once

#include <cstdint>
#include <vector>

namespace hessianlab {

struct Csr {
    int rows = 0, cols = 0;
    std::vector<std::int32_t> rowptr; // rows+1
    std::vector<std::int32_t> col;
    std::vector<double> val;

    // y = A x. Row-parallel (OpenMP); _serial is the reference path.
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
    void apply_serial(const std::vector<double>& x, std::vector<double>& y) const;
};

// Transpose pattern with a value-permutation map: At.val[perm[i]] = A.val[i].
Csr transpose_pattern(const Csr& a, std::vector<std::int32_t>& perm);

struct CglsResult {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

// CG on the normal equations (CGLS) with diagonal preconditioner diag(A^T A).
// Stops when ||b - Ax||_2 <= rel_tol * ||b||_2.
CglsResult cgls_solve(const Csr& A, const Csr& At, const std::vector<double>& b,
                      std::vector<double>& x, double rel_tol, int max_iter);

} // namespace hessianlab
