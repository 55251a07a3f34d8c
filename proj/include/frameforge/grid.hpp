#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace frameforge {

using Complex = std::complex<double>;
using GridFunction = Eigen::VectorXcd;

// A point in the periodic box; entries beyond the box dimension are zero.
using Point = std::array<double, 2>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Discretized periodic box [0, L)^d with N samples per axis.
/// All distances are torus distances.
class Box {
public:
    Box(int dim, double side, int points_per_axis);

    int dim() const { return dim_; }
    double side() const { return side_; }
    int points_per_axis() const { return n_; }
    double step() const { return side_ / n_; }
    long total_points() const;
    double cell_measure() const;  // h^d, the quadrature weight

    std::array<int, 2> coords(long index) const;
    long index(std::array<int, 2> c) const;  // coordinates wrap mod N
    Point point(long index) const;
    long snap(const Point& p) const;  // nearest grid point, torus-aware

    double wrap(double x) const;           // representative in [0, L)
    double centered(double x) const;       // representative in (-L/2, L/2]
    double axis_dist(double a, double b) const;
    double dist(const Point& a, const Point& b) const;
    double dist_to_origin(const Point& p) const;

    bool operator==(const Box& other) const;
    bool operator!=(const Box& other) const { return !(*this == other); }

private:
    int dim_;
    double side_;
    int n_;
};

/// Indexed point cloud in a Box; repeated positions are allowed and count
/// with multiplicity. Positions are snapped to the grid on ingestion.
class NodeSet {
public:
    NodeSet(Box box, const std::vector<Point>& positions,
            std::vector<int> labels = {});
    static NodeSet from_grid_indices(Box box, const std::vector<long>& cells,
                                     std::vector<int> labels = {});

    const Box& box() const { return box_; }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }
    Point position(std::size_t i) const;
    long grid_index(std::size_t i) const;
    int label(std::size_t i) const { return labels_[i]; }

    NodeSet translated(const Point& shift) const;
    NodeSet merged(const NodeSet& other) const;  // union with multiplicity
    NodeSet subset(std::span<const std::size_t> indices) const;

private:
    Box box_;
    std::vector<std::array<int, 2>> cells_;
    std::vector<int> labels_;
};

/// Polynomial weight w_t(x) = (1 + |x|)^t, |x| the torus distance to 0.
class Weight {
public:
    explicit Weight(double exponent) : t_(exponent) {}

    double exponent() const { return t_; }
    double at_dist(double dist) const;
    double at(const Box& box, const Point& p) const;
    double at_index(const Box& box, long index) const;

private:
    double t_;
};

/// Weight pair with v moderated by w: v(x+y) <= C v(x) w(y).
struct ModeratedPair {
    Weight v;
    Weight w;
    double constant;  // >= 1
};

/// Measures the smallest moderation constant over grid representatives with
/// torus distance <= L/2 (the regime where the inequality is asserted).
ModeratedPair make_moderated_pair(const Box& box, Weight v, Weight w);

// --- grid-core operations -------------------------------------------------

/// rel(Lambda): max count of node positions in a closed unit cube, swept over
/// all grid anchors. Throws std::invalid_argument("empty node set").
int rel_separation(const NodeSet& nodes);

/// True iff every grid point lies within torus distance < radius of a node.
bool is_L_dense(const NodeSet& nodes, double radius);

/// Largest distance from a grid point to its nearest node.
double covering_radius(const NodeSet& nodes);

/// ell^p norm of (|c_k| * v(position_k)); p = infinity gives the supremum.
double weighted_seq_norm(std::span<const Complex> c, const NodeSet& nodes,
                         double p, const Weight& v);

struct ConvNodesReport {
    double sum_total = 0;       // (a) sum over nodes of w_{-t}
    double constant_a = 0;      // (a) / rel
    std::vector<double> tail_radii;
    std::vector<double> tail_sums;
    double tail_slope = 0;      // log-log regression over the tail table
    double expected_slope = 0;  // -(t - d)
    double sup_ratio = 0;       // (c) sup_x sum w_{-t}(g) w_{-t}(x-g) / w_{-t}(x)
    double constant_c = 0;      // (c) / rel
    int rel = 0;
};

/// Numerical realization of the node-convolution lemma for t > d.
/// (a) and (c) sum over the in-box nodes with torus distances; the tail
/// table (b) sums over the periodic extension of the node set so that the
/// M^{-(t-d)} decay is visible beyond the half-period.
/// Throws std::invalid_argument("divergent exponent") if t <= d.
ConvNodesReport conv_nodes_check(const NodeSet& nodes, double t);

// --- grid function helpers -------------------------------------------------

/// <f, g> = sum f conj(g) h^d.
Complex inner(const Box& box, const GridFunction& f, const GridFunction& g);
double l2_norm(const Box& box, const GridFunction& f);

/// Weighted L^p_v norm (h^d quadrature); p = infinity gives max |f| v.
double lp_norm(const Box& box, const GridFunction& f, double p,
               const Weight& v);

// --- serialization ----------------------------------------------------------

std::string node_set_to_json(const NodeSet& nodes,
                             std::optional<Weight> weight = std::nullopt);
NodeSet node_set_from_json(const std::string& text);
std::optional<Weight> weight_from_json(const std::string& text);

// --- deterministic random draws ---------------------------------------------
// A tiny pinned generator so experiment outputs are reproducible byte-for-byte
// from a single recorded seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next_u64();
    double uniform();              // [0, 1)
    double uniform(double a, double b);
    double normal();               // standard normal, Box-Muller
    Complex normal_complex();
    int uniform_int(int lo, int hi);  // inclusive bounds

private:
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0;
};

}  // namespace frameforge
