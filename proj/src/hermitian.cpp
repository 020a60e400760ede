#include "hessianlab/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hessianlab {

namespace {

void check_dim(int n) {
    if (n < 1 || n > kMaxDim)
        throw ArgumentError("matrix dimension must be in [1," + std::to_string(kMaxDim) +
                            "], got " + std::to_string(n));
}

} // namespace

HermitianMatrix::HermitianMatrix(int n) : n_(n) { check_dim(n); }

HermitianMatrix HermitianMatrix::identity(int n) {
    HermitianMatrix m(n);
    for (int j = 0; j < n; ++j) m(j, j) = 1.0;
    return m;
}

HermitianMatrix HermitianMatrix::diagonal(std::initializer_list<double> d) {
    HermitianMatrix m(static_cast<int>(d.size()));
    int j = 0;
    for (double v : d) m(j, j) = v, ++j;
    return m;
}

double HermitianMatrix::hermitian_defect() const {
    double worst = 0.0;
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
            worst = std::max(worst, std::abs((*this)(j, k) - std::conj((*this)(k, j))));
    return worst;
}

HermitianMatrix HermitianMatrix::symmetrized() const {
    HermitianMatrix m(n_);
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
            m(j, k) = 0.5 * ((*this)(j, k) + std::conj((*this)(k, j)));
    return m;
}

double HermitianMatrix::trace_real() const {
    double t = 0.0;
    for (int j = 0; j < n_; ++j) t += (*this)(j, j).real();
    return t;
}

double HermitianMatrix::max_abs() const {
    double worst = 0.0;
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) worst = std::max(worst, std::abs((*this)(j, k)));
    return worst;
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& b) {
    if (b.n_ != n_) throw ArgumentError("matrix dimension mismatch");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += b.a_[i];
    return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& b) {
    if (b.n_ != n_) throw ArgumentError("matrix dimension mismatch");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= b.a_[i];
    return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
    for (auto& v : a_) v *= s;
    return *this;
}

EigenvalueVector::EigenvalueVector(std::initializer_list<double> v) {
    n_ = static_cast<int>(v.size());
    check_dim(n_);
    int j = 0;
    for (double x : v) v_[j++] = x;
    std::sort(v_.begin(), v_.begin() + n_);
}

EigenvalueVector EigenvalueVector::from_unsorted(std::span<const double> v) {
    EigenvalueVector e;
    e.n_ = static_cast<int>(v.size());
    check_dim(e.n_);
    std::copy(v.begin(), v.end(), e.v_.begin());
    std::sort(e.v_.begin(), e.v_.begin() + e.n_);
    return e;
}

HermitianMatrix EigenSystem::reconstruct() const {
    HermitianMatrix m(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            cplx s = 0.0;
            for (int i = 0; i < n; ++i)
                s += vectors[j * kMaxDim + i] * values[i] * std::conj(vectors[k * kMaxDim + i]);
            m(j, k) = s;
        }
    return m;
}

double sigma_k(const EigenvalueVector& lambda, int k) {
    const int n = lambda.size();
    if (k < 0 || k > n)
        throw ArgumentError("sigma_k: k must be in [0," + std::to_string(n) + "], got " +
                            std::to_string(k));
    // Coefficients of prod (x + lambda_i), built incrementally.
    std::array<double, kMaxDim + 1> e{};
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::min(i + 1, k); j >= 1; --j) e[j] += lambda[i] * e[j - 1];
    return e[k];
}

bool in_gamma_m(const EigenvalueVector& lambda, int m, bool strict, double slack) {
    if (m < 1 || m > lambda.size())
        throw ArgumentError("in_gamma_m: m must be in [1," + std::to_string(lambda.size()) +
                            "], got " + std::to_string(m));
    const double floor = strict ? 0.0 : -slack * (1.0 + std::abs(sigma_k(lambda, 1)));
    for (int k = 1; k <= m; ++k) {
        const double s = sigma_k(lambda, k);
        if (strict ? (s <= 0.0) : (s < floor)) return false;
    }
    return true;
}

namespace {

// One cyclic Jacobi pass machinery shared by the two entry points.
// Rotation on the (p,q) plane: with g = a_pq = r e^{i phi},
//   U = [[c, s*e], [-s*conj(e), c]],  e = e^{i phi},
// and c, s from the standard real 2x2 formula applied to [[alpha, r],[r, beta]].
template <bool WithVectors>
EigenSystem jacobi(const HermitianMatrix& A0) {
    if (A0.dim() < 1) throw ArgumentError("eigen_decompose: empty matrix");
    const double defect = A0.hermitian_defect();
    if (defect > kHermitianTol)
        throw ValidationError("matrix is not Hermitian within tolerance: defect " +
                              std::to_string(defect));
    const HermitianMatrix A = A0.symmetrized();
    const int n = A.dim();

    std::array<cplx, kMaxDim * kMaxDim> a{};
    std::array<cplx, kMaxDim * kMaxDim> v{};
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) a[j * kMaxDim + k] = A(j, k);
    for (int j = 0; j < n; ++j) v[j * kMaxDim + j] = 1.0;
    auto at = [&](int j, int k) -> cplx& { return a[j * kMaxDim + k]; };

    double frob = 0.0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) frob += std::norm(at(j, k));
    frob = std::sqrt(frob);
    const double off_tol = 1e-12 * std::max(1.0, frob);

    const int max_sweeps = 60;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * std::norm(at(p, q));
        if (std::sqrt(off) <= off_tol) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx g = at(p, q);
                const double r = std::abs(g);
                if (r == 0.0) continue;
                const cplx e = g / r;
                const double alpha = at(p, p).real();
                const double beta = at(q, q).real();
                const double theta = (beta - alpha) / (2.0 * r);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                at(p, p) = alpha * c * c - 2.0 * r * c * s + beta * s * s;
                at(q, q) = alpha * s * s + 2.0 * r * c * s + beta * c * c;
                at(p, q) = 0.0;
                at(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const cplx aip = at(i, p), aiq = at(i, q);
                    at(i, p) = c * aip - s * std::conj(e) * aiq;
                    at(i, q) = s * e * aip + c * aiq;
                    at(p, i) = std::conj(at(i, p));
                    at(q, i) = std::conj(at(i, q));
                }
                if constexpr (WithVectors) {
                    for (int i = 0; i < n; ++i) {
                        const cplx vip = v[i * kMaxDim + p], viq = v[i * kMaxDim + q];
                        v[i * kMaxDim + p] = c * vip - s * std::conj(e) * viq;
                        v[i * kMaxDim + q] = s * e * vip + c * viq;
                    }
                }
            }
        }
    }
    if (sweep == max_sweeps)
        throw NumericalError("Jacobi eigensolver did not converge in 60 sweeps");

    std::array<int, kMaxDim> perm{};
    std::iota(perm.begin(), perm.begin() + n, 0);
    std::sort(perm.begin(), perm.begin() + n,
              [&](int i, int j) { return at(i, i).real() < at(j, j).real(); });

    EigenSystem es;
    es.n = n;
    std::array<double, kMaxDim> vals{};
    for (int i = 0; i < n; ++i) vals[i] = at(perm[i], perm[i]).real();
    es.values = EigenvalueVector::from_unsorted({vals.data(), static_cast<size_t>(n)});
    if constexpr (WithVectors) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) es.vectors[j * kMaxDim + i] = v[j * kMaxDim + perm[i]];
    }
    return es;
}

} // namespace

EigenSystem eigen_decompose(const HermitianMatrix& A) { return jacobi<true>(A); }

EigenvalueVector eigenvalues(const HermitianMatrix& A) { return jacobi<false>(A).values; }

HermitianMatrix sigma_m_gradient(const HermitianMatrix& A, int m) {
    const int n = A.dim();
    if (m < 1 || m > n)
        throw ArgumentError("sigma_m_gradient: m must be in [1," + std::to_string(n) + "]");
    const EigenSystem es = eigen_decompose(A);

    // sigma_{m-1} of the spectrum with entry i removed, per eigenvalue.
    std::array<double, kMaxDim> g{};
    for (int i = 0; i < n; ++i) {
        std::array<double, kMaxDim> rest{};
        int c = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) rest[c++] = es.values[j];
        if (m - 1 == 0) {
            g[i] = 1.0;
        } else {
            auto lam = EigenvalueVector::from_unsorted({rest.data(), static_cast<size_t>(c)});
            g[i] = sigma_k(lam, m - 1);
        }
    }

    HermitianMatrix G(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            cplx s = 0.0;
            for (int i = 0; i < n; ++i)
                s += es.vectors[j * kMaxDim + i] * g[i] * std::conj(es.vectors[k * kMaxDim + i]);
            G(j, k) = s;
        }
    return G.symmetrized();
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace hessianlab
