#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <span>

#include "hessianlab/errors.hpp"

namespace hessianlab {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 4;
inline constexpr double kHermitianTol = 1e-12; // max |a_jk - conj(a_kj)| accepted

// Dense n x n complex matrix, n <= 4, meant to hold Hermitian data.
// Construction does not symmetrize; eigen_decompose() validates and symmetrizes.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(int n);
    static HermitianMatrix identity(int n);
    static HermitianMatrix diagonal(std::initializer_list<double> d);

    int dim() const { return n_; }
    cplx& operator()(int j, int k) { return a_[j * kMaxDim + k]; }
    const cplx& operator()(int j, int k) const { return a_[j * kMaxDim + k]; }

    double hermitian_defect() const;    // max_jk |a_jk - conj(a_kj)|
    HermitianMatrix symmetrized() const; // (A + A*)/2
    double trace_real() const;
    double max_abs() const;

    HermitianMatrix& operator+=(const HermitianMatrix& b);
    HermitianMatrix& operator-=(const HermitianMatrix& b);
    HermitianMatrix& operator*=(double s);
    friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
    friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
    friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

private:
    int n_ = 0;
    std::array<cplx, kMaxDim * kMaxDim> a_{};
};

// Real spectrum, sorted non-decreasing.
class EigenvalueVector {
public:
    EigenvalueVector() = default;
    EigenvalueVector(std::initializer_list<double> v); // sorts
    static EigenvalueVector from_unsorted(std::span<const double> v);

    int size() const { return n_; }
    double operator[](int i) const { return v_[i]; }
    std::span<const double> values() const { return {v_.data(), static_cast<size_t>(n_)}; }

private:
    int n_ = 0;
    std::array<double, kMaxDim> v_{};
};

struct EigenSystem {
    int n = 0;
    EigenvalueVector values;
    std::array<cplx, kMaxDim * kMaxDim> vectors{}; // column i pairs with values[i]
    HermitianMatrix reconstruct() const;           // V diag(values) V*
};

// k-th elementary symmetric polynomial of the spectrum; sigma_0 = 1.
double sigma_k(const EigenvalueVector& lambda, int k);

// Gamma_m cone membership. strict: sigma_k > 0 for k = 1..m.
// Non-strict admits a relative slack: sigma_k >= -slack * (1 + |sigma_1|),
// which tolerates discretization noise on the cone boundary.
bool in_gamma_m(const EigenvalueVector& lambda, int m, bool strict, double slack = 1e-12);

// Cyclic Jacobi diagonalization for Hermitian matrices up to 4x4.
// Validates Hermitian symmetry to kHermitianTol, symmetrizes, and returns the
// sorted real spectrum (with unitary eigenvector columns in eigen_decompose).
EigenSystem eigen_decompose(const HermitianMatrix& A);
EigenvalueVector eigenvalues(const HermitianMatrix& A);

// Gradient of A -> sigma_m(lambda(A)) as a Hermitian matrix G:
// d/de sigma_m(lambda(A + eH)) = tr(G H). Equals V diag(sigma_{m-1} of the
// complementary spectrum) V*; positive definite inside the strict cone.
HermitianMatrix sigma_m_gradient(const HermitianMatrix& A, int m);

double binomial(int n, int k);
double factorial(int n);

} // namespace hessianlab
