#include "hessianlab/sparse.hpp"

#include <cmath>

namespace hessianlab {

void Csr::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(rows);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::int32_t k = rowptr[i]; k < rowptr[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
}

void Csr::apply_serial(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(rows);
    for (int i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::int32_t k = rowptr[i]; k < rowptr[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
}

Csr transpose_pattern(const Csr& a, std::vector<std::int32_t>& perm) {
    Csr t;
    t.rows = a.cols;
    t.cols = a.rows;
    t.rowptr.assign(t.rows + 1, 0);
    for (std::int32_t c : a.col) ++t.rowptr[c + 1];
    for (int i = 0; i < t.rows; ++i) t.rowptr[i + 1] += t.rowptr[i];
    t.col.resize(a.col.size());
    t.val.assign(a.val.size(), 0.0);
    perm.resize(a.val.size());
    std::vector<std::int32_t> fill(t.rowptr.begin(), t.rowptr.end() - 1);
    for (int i = 0; i < a.rows; ++i)
        for (std::int32_t k = a.rowptr[i]; k < a.rowptr[i + 1]; ++k) {
            const std::int32_t slot = fill[a.col[k]]++;
            t.col[slot] = i;
            perm[k] = slot;
        }
    return t;
}

namespace {

// serial dot products keep the iteration bitwise deterministic
double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

CglsResult cgls_solve(const Csr& A, const Csr& At, const std::vector<double>& b,
                      std::vector<double>& x, double rel_tol, int max_iter) {
    const int n = A.cols;
    x.assign(n, 0.0);

    std::vector<double> precond(n, 0.0);
    for (int j = 0; j < At.rows; ++j) {
        double s = 0.0;
        for (std::int32_t k = At.rowptr[j]; k < At.rowptr[j + 1]; ++k) s += At.val[k] * At.val[k];
        precond[j] = (s > 0.0) ? 1.0 / s : 1.0;
    }

    std::vector<double> r = b; // r = b - A*0
    std::vector<double> s(n), z(n), p(n), q(A.rows);
    At.apply(r, s);
    for (int j = 0; j < n; ++j) z[j] = s[j] * precond[j];
    p = z;
    double gamma = dot(s, z);
    const double normb = std::sqrt(dot(b, b));
    CglsResult res;
    if (normb == 0.0) {
        res.converged = true;
        return res;
    }

    for (int it = 0; it < max_iter; ++it) {
        A.apply(p, q);
        const double qq = dot(q, q);
        if (qq == 0.0 || gamma == 0.0) break;
        const double alpha = gamma / qq;
        for (int j = 0; j < n; ++j) x[j] += alpha * p[j];
        for (int j = 0; j < A.rows; ++j) r[j] -= alpha * q[j];
        res.iterations = it + 1;
        res.rel_residual = std::sqrt(dot(r, r)) / normb;
        if (res.rel_residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        At.apply(r, s);
        for (int j = 0; j < n; ++j) z[j] = s[j] * precond[j];
        const double gamma_new = dot(s, z);
        const double beta = gamma_new / gamma;
        for (int j = 0; j < n; ++j) p[j] = z[j] + beta * p[j];
        gamma = gamma_new;
    }
    return res;
}

} // namespace hessianlab
