#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hessianlab/hermitian.hpp"

namespace hessianlab {

// Dirichlet datum: continuous function on the unit sphere, called with 2n real
// coordinates (x1, y1, ..., xn, yn). Must be pure / thread-safe.
using BoundaryFn = std::function<double(std::span<const double>)>;

// One side of an axis (or diagonal-ray) stencil: an interior neighbor at
// lattice distance, or the exact ray intersection with the unit sphere.
struct Arm {
    std::int32_t neighbor = -1; // interior index, or -1 for a sphere arm
    std::int32_t sphere = -1;   // index into sphere point table when neighbor < 0
    double length = 0.0;        // h for lattice arms, theta*h for sphere arms
    bool is_sphere() const { return neighbor < 0; }
};

struct AxisStencil {
    Arm minus, plus;
};

// Scalar node of a mixed-derivative stencil.
struct CrossNode {
    std::int32_t neighbor = -1; // interior index, or -1 for sphere node
    std::int32_t sphere = -1;
    double weight = 0.0;
};

struct CrossRange {
    std::int32_t offset = 0;
    std::int32_t count = 0;
    std::int8_t order = 2; // 2: full 4-point cross, 1: one-sided / diagonal fallback
};

// Uniform lattice discretization of the unit ball in C^n ~ R^{2n}.
// Interior points are lattice points with |z| < 1 - h/2; each interior point
// carries, per real axis, two arms (lattice neighbor or Shortley-Weller sphere
// intersection) and, per mixed real-axis pair, a cross-derivative stencil.
class BallGrid {
public:
    BallGrid(int n, int q); // h = 1/q; enforces desk-scale limits

    int complex_dim() const { return n_; }
    int real_dim() const { return 2 * n_; }
    double spacing() const { return h_; }
    int denominator() const { return q_; }
    int num_interior() const { return static_cast<int>(points_.size() / (2 * n_)); }
    int num_sphere_points() const { return static_cast<int>(sphere_.size() / (2 * n_)); }

    std::span<const double> point(int i) const { return {&points_[i * 2 * n_], size_t(2 * n_)}; }
    std::span<const int> lattice(int i) const { return {&lat_[i * 2 * n_], size_t(2 * n_)}; }
    std::span<const double> sphere_point(int s) const {
        return {&sphere_[s * 2 * n_], size_t(2 * n_)};
    }
    // Interior index of the lattice point with integer coords c, or -1.
    int index_at(std::span<const int> c) const;

    const AxisStencil& axis(int i, int d) const { return axis_[i * 2 * n_ + d]; }
    bool boundary_adjacent(int i) const { return boundary_adjacent_[i] != 0; }

    int num_pairs() const { return static_cast<int>(pairs_.size()); }
    std::pair<int, int> pair_axes(int pi) const { return pairs_[pi]; }
    int pair_index(int a, int b) const { return pair_index_[a * 2 * n_ + b]; }
    const CrossRange& cross(int i, int pi) const { return cross_[i * num_pairs() + pi]; }
    std::span<const CrossNode> cross_nodes(const CrossRange& r) const {
        return {&cross_nodes_[r.offset], size_t(r.count)};
    }

    // Interior nodes and sphere nodes reachable by the full stencil of point i
    // (axis arms, cross nodes, including i itself).
    void visit_stencil(int i, const std::function<void(int)>& interior,
                       const std::function<void(int)>& sphere) const;

    int fallback_cross_count() const { return fallback_crosses_; }
    int diagonal_cross_count() const { return diagonal_crosses_; }

    double cell_volume() const; // h^{2n}
    bool same_layout(const BallGrid& o) const { return n_ == o.n_ && q_ == o.q_; }

private:
    void build_axis_stencils();
    void build_cross_stencils();
    double ray_to_sphere(std::span<const double> p, std::span<const double> dir) const;
    int add_sphere_point(std::span<const double> p, std::span<const double> dir, double t);

    int n_ = 0, q_ = 0;
    double h_ = 0.0;
    int imax_ = 0, side_ = 0;
    std::vector<std::int32_t> index_of_; // dense lattice box -> interior index or -1
    std::vector<double> points_;
    std::vector<int> lat_;
    std::vector<AxisStencil> axis_;
    std::vector<double> sphere_;
    std::vector<std::uint8_t> boundary_adjacent_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<int> pair_index_;
    std::vector<CrossRange> cross_;
    std::vector<CrossNode> cross_nodes_;
    int fallback_crosses_ = 0;
    int diagonal_crosses_ = 0;
};

std::shared_ptr<const BallGrid> make_grid(int n, int q);

// Real-valued grid function: interior values plus a Dirichlet trace.
struct GridFunction {
    std::shared_ptr<const BallGrid> grid;
    std::vector<double> values;
    BoundaryFn boundary;

    static GridFunction zeros(std::shared_ptr<const BallGrid> g);
    static GridFunction from_function(std::shared_ptr<const BallGrid> g,
                                      const std::function<double(std::span<const double>)>& f);
};

// One Hermitian matrix per interior point (omega, dd^c u, tau, ...).
struct HermitianField {
    std::shared_ptr<const BallGrid> grid;
    std::vector<HermitianMatrix> m;

    static HermitianField constant(std::shared_ptr<const BallGrid> g, const HermitianMatrix& v);
    static HermitianField zero(std::shared_ptr<const BallGrid> g);
};

HermitianField operator+(const HermitianField& a, const HermitianField& b);
HermitianField operator-(const HermitianField& a, const HermitianField& b);

// Discrete complex Hessian d^2/dz_j dz_bar_k by second-order central
// differences, normalized so that complex_hessian(|z|^2) = I exactly.
// Near-boundary points use the Shortley-Weller arms with phi at the exact
// sphere intersection. OpenMP-parallel over interior points; the _serial
// variant is the reference implementation (bitwise identical results).
HermitianField complex_hessian(const GridFunction& u);
HermitianField complex_hessian_serial(const GridFunction& u);

// Boundary values of u at every sphere stencil point, in table order.
std::vector<double> boundary_values(const GridFunction& u);

// Discrete complex Hessian at a single interior point, given precomputed
// boundary values (as returned by boundary_values).
HermitianMatrix hessian_at_point(const BallGrid& g, const GridFunction& u,
                                 std::span<const double> boundary_vals, int i);

double sup_norm_diff(const GridFunction& u, const GridFunction& v);
GridFunction max_of(const GridFunction& u, const GridFunction& v);

} // namespace hessianlab
