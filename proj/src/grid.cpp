#include "hessianlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace hessianlab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

BallGrid::BallGrid(int n, int q) : n_(n), q_(q) {
    if (n < 1 || n > 2)
        throw ConfigError("grid: complex dimension n must be 1 or 2, got " + std::to_string(n));
    if (q < 2) throw ConfigError("grid: spacing must be 1/q with integer q >= 2");
    if (n == 1 && q > 64) throw ConfigError("grid: desk-scale limit for n=1 is h >= 1/64");
    if (n == 2 && q > 10) throw ConfigError("grid: desk-scale limit for n=2 is h >= 1/10");
    h_ = 1.0 / q;

    const int D = 2 * n_;
    imax_ = q_ - 1; // |i|*h < 1 - h/2  <=>  |i| < q - 1/2
    side_ = 2 * imax_ + 1;
    size_t box = 1;
    for (int d = 0; d < D; ++d) box *= side_;
    index_of_.assign(box, -1);

    // Enumerate lattice points inside |z| < 1 - h/2 in lexicographic order.
    const double rad2 = (q_ - 0.5) * (q_ - 0.5); // in lattice units
    std::vector<int> c(D, -imax_);
    while (true) {
        double s2 = 0.0;
        for (int d = 0; d < D; ++d) s2 += double(c[d]) * c[d];
        if (s2 < rad2) {
            size_t key = 0;
            for (int d = 0; d < D; ++d) key = key * side_ + (c[d] + imax_);
            index_of_[key] = static_cast<std::int32_t>(points_.size() / D);
            for (int d = 0; d < D; ++d) {
                points_.push_back(c[d] * h_);
                lat_.push_back(c[d]);
            }
        }
        int d = D - 1;
        while (d >= 0 && c[d] == imax_) c[d--] = -imax_;
        if (d < 0) break;
        ++c[d];
    }

    // at least 3 interior points per axis
    int on_axis = 0;
    for (int i = -imax_; i <= imax_; ++i)
        if (double(i) * i < rad2) ++on_axis;
    if (on_axis < 3) throw ConfigError("grid: fewer than 3 interior points per axis");

    build_axis_stencils();
    build_cross_stencils();
}

int BallGrid::index_at(std::span<const int> c) const {
    size_t key = 0;
    for (size_t d = 0; d < c.size(); ++d) {
        if (c[d] < -imax_ || c[d] > imax_) return -1;
        key = key * side_ + (c[d] + imax_);
    }
    return index_of_[key];
}

double BallGrid::ray_to_sphere(std::span<const double> p, std::span<const double> dir) const {
    const double pd = dot(p, dir);
    const double disc = pd * pd + 1.0 - dot(p, p);
    return -pd + std::sqrt(disc);
}

int BallGrid::add_sphere_point(std::span<const double> p, std::span<const double> dir, double t) {
    const int D = 2 * n_;
    const int idx = static_cast<int>(sphere_.size() / D);
    for (int d = 0; d < D; ++d) sphere_.push_back(p[d] + t * dir[d]);
    return idx;
}

void BallGrid::build_axis_stencils() {
    const int D = 2 * n_;
    const int N = num_interior();
    axis_.resize(size_t(N) * D);
    boundary_adjacent_.assign(N, 0);
    std::vector<int> nb(D);
    std::vector<double> dir(D);

    for (int i = 0; i < N; ++i) {
        auto li = lattice(i);
        auto pi = point(i);
        for (int d = 0; d < D; ++d) {
            for (int sgn : {-1, +1}) {
                std::copy(li.begin(), li.end(), nb.begin());
                nb[d] += sgn;
                Arm arm;
                const int j = index_at(nb);
                if (j >= 0) {
                    arm.neighbor = j;
                    arm.length = h_;
                } else {
                    std::fill(dir.begin(), dir.end(), 0.0);
                    dir[d] = sgn;
                    const double t = ray_to_sphere(pi, dir);
                    arm.sphere = add_sphere_point(pi, dir, t);
                    arm.length = t;
                    boundary_adjacent_[i] = 1;
                }
                (sgn < 0 ? axis_[size_t(i) * D + d].minus : axis_[size_t(i) * D + d].plus) = arm;
            }
        }
    }
}

namespace {

// Accumulates scalar stencil nodes, merging repeats.
struct NodeAccum {
    std::vector<CrossNode> nodes;
    void add(int interior, int sphere, double w) {
        for (auto& n : nodes)
            if (n.neighbor == interior && n.sphere == sphere) {
                n.weight += w;
                return;
            }
        nodes.push_back({interior, sphere, w});
    }
};

// 3-point first derivative at point x along axis b, scaled: exact on quadratics.
void add_first_derivative(const BallGrid& g, int x, int b, double scale, NodeAccum& acc) {
    const AxisStencil& st = g.axis(x, b);
    const double al = st.minus.length, ar = st.plus.length;
    const double denom = al * ar * (al + ar);
    acc.add(st.minus.neighbor, st.minus.sphere, scale * (-ar * ar / denom));
    acc.add(st.plus.neighbor, st.plus.sphere, scale * (al * al / denom));
    acc.add(x, -1, scale * ((ar * ar - al * al) / denom));
}

} // namespace

void BallGrid::build_cross_stencils() {
    const int D = 2 * n_;
    pair_index_.assign(size_t(D) * D, -1);
    for (int a = 0; a < D; ++a)
        for (int b = a + 1; b < D; ++b)
            if (a / 2 != b / 2) { // only mixed pairs across complex slots
                pair_index_[a * D + b] = static_cast<int>(pairs_.size());
                pairs_.emplace_back(a, b);
            }
    if (pairs_.empty()) return;

    const int N = num_interior();
    cross_.resize(size_t(N) * pairs_.size());
    std::vector<int> nb(D);
    std::vector<double> dir(D);

    for (int i = 0; i < N; ++i) {
        auto li = lattice(i);
        auto pi = point(i);
        for (size_t pidx = 0; pidx < pairs_.size(); ++pidx) {
            const auto [a, b] = pairs_[pidx];
            NodeAccum acc;
            std::int8_t order = 2;

            // full 4-point cross when all diagonal lattice neighbors are interior
            int diag[2][2];
            bool full = true;
            for (int sa : {0, 1})
                for (int sb : {0, 1}) {
                    std::copy(li.begin(), li.end(), nb.begin());
                    nb[a] += sa ? 1 : -1;
                    nb[b] += sb ? 1 : -1;
                    diag[sa][sb] = index_at(nb);
                    if (diag[sa][sb] < 0) full = false;
                }
            if (full) {
                const double w = 1.0 / (4.0 * h_ * h_);
                acc.add(diag[1][1], -1, w);
                acc.add(diag[1][0], -1, -w);
                acc.add(diag[0][1], -1, -w);
                acc.add(diag[0][0], -1, w);
            } else {
                ++fallback_crosses_;
                order = 1;
                // interior axis neighbors along a and b
                const AxisStencil& sa = axis(i, a);
                const AxisStencil& sb = axis(i, b);
                const bool am = !sa.minus.is_sphere(), ap = !sa.plus.is_sphere();
                const bool bm = !sb.minus.is_sphere(), bp = !sb.plus.is_sphere();
                if (am && ap) { // central in a of d/db
                    add_first_derivative(*this, sa.plus.neighbor, b, 1.0 / (2.0 * h_), acc);
                    add_first_derivative(*this, sa.minus.neighbor, b, -1.0 / (2.0 * h_), acc);
                } else if (am || ap) {
                    const int q = ap ? sa.plus.neighbor : sa.minus.neighbor;
                    const double s = ap ? 1.0 : -1.0;
                    add_first_derivative(*this, q, b, s / h_, acc);
                    add_first_derivative(*this, i, b, -s / h_, acc);
                } else if (bm || bp) { // transposed order
                    if (bm && bp) {
                        add_first_derivative(*this, sb.plus.neighbor, a, 1.0 / (2.0 * h_), acc);
                        add_first_derivative(*this, sb.minus.neighbor, a, -1.0 / (2.0 * h_), acc);
                    } else {
                        const int q = bp ? sb.plus.neighbor : sb.minus.neighbor;
                        const double s = bp ? 1.0 : -1.0;
                        add_first_derivative(*this, q, a, s / h_, acc);
                        add_first_derivative(*this, i, a, -s / h_, acc);
                    }
                } else {
                    // no interior neighbor along either axis: second differences
                    // along the two diagonal rays, da db = (D2_+ - D2_-)/2
                    ++diagonal_crosses_;
                    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
                    for (int sign_b : {+1, -1}) {
                        const double dscale = (sign_b > 0 ? 0.5 : -0.5);
                        double arm_len[2];
                        int arm_nb[2], arm_sp[2];
                        for (int s = 0; s < 2; ++s) { // s=0 minus arm, s=1 plus arm
                            const int sgn = s ? 1 : -1;
                            std::copy(li.begin(), li.end(), nb.begin());
                            nb[a] += sgn;
                            nb[b] += sgn * sign_b;
                            const int j = index_at(nb);
                            if (j >= 0) {
                                arm_nb[s] = j;
                                arm_sp[s] = -1;
                                arm_len[s] = std::sqrt(2.0) * h_;
                            } else {
                                std::fill(dir.begin(), dir.end(), 0.0);
                                dir[a] = sgn * inv_sqrt2;
                                dir[b] = sgn * sign_b * inv_sqrt2;
                                const double t = ray_to_sphere(pi, dir);
                                arm_nb[s] = -1;
                                arm_sp[s] = add_sphere_point(pi, dir, t);
                                arm_len[s] = t;
                            }
                        }
                        const double al = arm_len[0], ar = arm_len[1];
                        acc.add(arm_nb[0], arm_sp[0], dscale * 2.0 / (al * (al + ar)));
                        acc.add(arm_nb[1], arm_sp[1], dscale * 2.0 / (ar * (al + ar)));
                        acc.add(i, -1, dscale * (-2.0 / (al * ar)));
                    }
                }
            }

            CrossRange r;
            r.offset = static_cast<std::int32_t>(cross_nodes_.size());
            r.count = static_cast<std::int32_t>(acc.nodes.size());
            r.order = order;
            cross_nodes_.insert(cross_nodes_.end(), acc.nodes.begin(), acc.nodes.end());
            cross_[i * pairs_.size() + pidx] = r;
        }
    }
}

void BallGrid::visit_stencil(int i, const std::function<void(int)>& interior,
                             const std::function<void(int)>& sphere) const {
    const int D = 2 * n_;
    interior(i);
    for (int d = 0; d < D; ++d) {
        for (const Arm* a : {&axis(i, d).minus, &axis(i, d).plus}) {
            if (a->is_sphere())
                sphere(a->sphere);
            else
                interior(a->neighbor);
        }
    }
    for (int pi = 0; pi < num_pairs(); ++pi) {
        for (const CrossNode& nd : cross_nodes(cross(i, pi))) {
            if (nd.neighbor >= 0)
                interior(nd.neighbor);
            else
                sphere(nd.sphere);
        }
    }
}

double BallGrid::cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < 2 * n_; ++d) v *= h_;
    return v;
}

std::shared_ptr<const BallGrid> make_grid(int n, int q) {
    return std::make_shared<const BallGrid>(n, q);
}

GridFunction GridFunction::zeros(std::shared_ptr<const BallGrid> g) {
    GridFunction f;
    f.values.assign(g->num_interior(), 0.0);
    f.grid = std::move(g);
    f.boundary = [](std::span<const double>) { return 0.0; };
    return f;
}

GridFunction GridFunction::from_function(std::shared_ptr<const BallGrid> g,
                                         const std::function<double(std::span<const double>)>& f) {
    GridFunction u;
    u.values.resize(g->num_interior());
    for (int i = 0; i < g->num_interior(); ++i) u.values[i] = f(g->point(i));
    u.grid = std::move(g);
    u.boundary = f;
    return u;
}

HermitianField HermitianField::constant(std::shared_ptr<const BallGrid> g,
                                        const HermitianMatrix& v) {
    if (v.dim() != g->complex_dim())
        throw ArgumentError("HermitianField: matrix dimension does not match grid");
    HermitianField f;
    f.m.assign(g->num_interior(), v);
    f.grid = std::move(g);
    return f;
}

HermitianField HermitianField::zero(std::shared_ptr<const BallGrid> g) {
    const int n = g->complex_dim();
    return constant(std::move(g), HermitianMatrix(n));
}

HermitianField operator+(const HermitianField& a, const HermitianField& b) {
    if (!a.grid->same_layout(*b.grid)) throw ArgumentError("field grid mismatch");
    HermitianField r = a;
    for (size_t i = 0; i < r.m.size(); ++i) r.m[i] += b.m[i];
    return r;
}

HermitianField operator-(const HermitianField& a, const HermitianField& b) {
    if (!a.grid->same_layout(*b.grid)) throw ArgumentError("field grid mismatch");
    HermitianField r = a;
    for (size_t i = 0; i < r.m.size(); ++i) r.m[i] -= b.m[i];
    return r;
}

std::vector<double> boundary_values(const GridFunction& u) {
    const BallGrid& g = *u.grid;
    if (!u.boundary && g.num_sphere_points() > 0)
        throw ValidationError("grid function has no boundary evaluator");
    std::vector<double> bv(g.num_sphere_points());
    for (int s = 0; s < g.num_sphere_points(); ++s) bv[s] = u.boundary(g.sphere_point(s));
    return bv;
}

namespace {

inline double arm_value(const GridFunction& u, std::span<const double> bv, const Arm& a) {
    return a.is_sphere() ? bv[a.sphere] : u.values[a.neighbor];
}

} // namespace

HermitianMatrix hessian_at_point(const BallGrid& g, const GridFunction& u,
                                 std::span<const double> bv, int i) {
    const int n = g.complex_dim();
    HermitianMatrix H(n);
    const double v0 = u.values[i];
    for (int j = 0; j < n; ++j) {
        double d = 0.0;
        for (int ax : {2 * j, 2 * j + 1}) {
            const AxisStencil& st = g.axis(i, ax);
            const double al = st.minus.length, ar = st.plus.length;
            const double vl = arm_value(u, bv, st.minus);
            const double vr = arm_value(u, bv, st.plus);
            d += 2.0 * (vl / (al * (al + ar)) - v0 / (al * ar) + vr / (ar * (al + ar)));
        }
        H(j, j) = 0.25 * d;
    }
    auto cross_val = [&](int a, int b) {
        const CrossRange& r = g.cross(i, g.pair_index(a, b));
        double s = 0.0;
        for (const CrossNode& nd : g.cross_nodes(r))
            s += nd.weight * (nd.neighbor >= 0 ? u.values[nd.neighbor] : bv[nd.sphere]);
        return s;
    };
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            const double cxx = cross_val(2 * j, 2 * k);
            const double cyy = cross_val(2 * j + 1, 2 * k + 1);
            const double cxy = cross_val(2 * j, 2 * k + 1);
            const double cyx = cross_val(2 * j + 1, 2 * k);
            H(j, k) = cplx(0.25 * (cxx + cyy), 0.25 * (cxy - cyx));
            H(k, j) = std::conj(H(j, k));
        }
    return H;
}

HermitianField complex_hessian(const GridFunction& u) {
    const BallGrid& g = *u.grid;
    const std::vector<double> bv = boundary_values(u);
    HermitianField f;
    f.grid = u.grid;
    f.m.assign(g.num_interior(), HermitianMatrix(g.complex_dim()));
    const int N = g.num_interior();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i) f.m[i] = hessian_at_point(g, u, bv, i);
    return f;
}

HermitianField complex_hessian_serial(const GridFunction& u) {
    const BallGrid& g = *u.grid;
    const std::vector<double> bv = boundary_values(u);
    HermitianField f;
    f.grid = u.grid;
    f.m.assign(g.num_interior(), HermitianMatrix(g.complex_dim()));
    for (int i = 0; i < g.num_interior(); ++i) f.m[i] = hessian_at_point(g, u, bv, i);
    return f;
}

double sup_norm_diff(const GridFunction& u, const GridFunction& v) {
    if (!u.grid->same_layout(*v.grid)) throw ArgumentError("sup_norm_diff: grid mismatch");
    double worst = 0.0;
    for (size_t i = 0; i < u.values.size(); ++i)
        worst = std::max(worst, std::abs(u.values[i] - v.values[i]));
    return worst;
}

GridFunction max_of(const GridFunction& u, const GridFunction& v) {
    if (!u.grid->same_layout(*v.grid)) throw ArgumentError("max_of: grid mismatch");
    GridFunction r;
    r.grid = u.grid;
    r.values.resize(u.values.size());
    for (size_t i = 0; i < u.values.size(); ++i) r.values[i] = std::max(u.values[i], v.values[i]);
    auto bu = u.boundary, bv = v.boundary;
    r.boundary = [bu, bv](std::span<const double> x) { return std::max(bu(x), bv(x)); };
    return r;
}

} // namespace hessianlab
