#include "frameforge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace frameforge {

namespace {

using json = nlohmann::json;

double regression_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace

// --- Box ---------------------------------------------------------------

Box::Box(int dim, double side, int points_per_axis)
    : dim_(dim), side_(side), n_(points_per_axis) {
    if (dim < 1 || dim > 2)
        throw std::invalid_argument("Box: dim must be 1 or 2");
    if (!(side >= 4.0))
        throw std::invalid_argument("Box: side must be >= 4 (unit-cube statistics degenerate below)");
    if (points_per_axis < 2)
        throw std::invalid_argument("Box: points_per_axis must be >= 2");
}

long Box::total_points() const {
    long total = 1;
    for (int a = 0; a < dim_; ++a) total *= n_;
    return total;
}

double Box::cell_measure() const {
    double m = 1;
    for (int a = 0; a < dim_; ++a) m *= step();
    return m;
}

std::array<int, 2> Box::coords(long index) const {
    if (dim_ == 1) return {static_cast<int>(index), 0};
    return {static_cast<int>(index / n_), static_cast<int>(index % n_)};
}

long Box::index(std::array<int, 2> c) const {
    auto wrap_i = [this](int v) {
        int m = v % n_;
        return m < 0 ? m + n_ : m;
    };
    if (dim_ == 1) return wrap_i(c[0]);
    return static_cast<long>(wrap_i(c[0])) * n_ + wrap_i(c[1]);
}

Point Box::point(long index) const {
    auto c = coords(index);
    return {c[0] * step(), dim_ == 2 ? c[1] * step() : 0.0};
}

long Box::snap(const Point& p) const {
    std::array<int, 2> c{0, 0};
    for (int a = 0; a < dim_; ++a) {
        long k = std::lround(p[a] / step());
        c[a] = static_cast<int>(((k % n_) + n_) % n_);
    }
    return index(c);
}

double Box::wrap(double x) const {
    double y = std::fmod(x, side_);
    return y < 0 ? y + side_ : y;
}

double Box::centered(double x) const {
    double y = wrap(x);
    return y > side_ / 2 ? y - side_ : y;
}

double Box::axis_dist(double a, double b) const {
    double d = std::abs(centered(a - b));
    return d;
}

double Box::dist(const Point& a, const Point& b) const {
    double s = 0;
    for (int ax = 0; ax < dim_; ++ax) {
        double d = axis_dist(a[ax], b[ax]);
        s += d * d;
    }
    return std::sqrt(s);
}

double Box::dist_to_origin(const Point& p) const {
    return dist(p, {0.0, 0.0});
}

bool Box::operator==(const Box& other) const {
    return dim_ == other.dim_ && side_ == other.side_ && n_ == other.n_;
}

// --- NodeSet ----------------------------------------------------------

NodeSet::NodeSet(Box box, const std::vector<Point>& positions,
                 std::vector<int> labels)
    : box_(box) {
    cells_.reserve(positions.size());
    for (const auto& p : positions) cells_.push_back(box_.coords(box_.snap(p)));
    if (labels.empty()) {
        labels_.resize(positions.size());
        for (std::size_t i = 0; i < labels_.size(); ++i) labels_[i] = static_cast<int>(i);
    } else {
        if (labels.size() != positions.size())
            throw std::invalid_argument("NodeSet: labels/positions length mismatch");
        labels_ = std::move(labels);
    }
}

NodeSet NodeSet::from_grid_indices(Box box, const std::vector<long>& cells,
                                   std::vector<int> labels) {
    std::vector<Point> pos;
    pos.reserve(cells.size());
    for (long c : cells) pos.push_back(box.point(c));
    return NodeSet(box, pos, std::move(labels));
}

Point NodeSet::position(std::size_t i) const {
    const auto& c = cells_[i];
    return {c[0] * box_.step(), box_.dim() == 2 ? c[1] * box_.step() : 0.0};
}

long NodeSet::grid_index(std::size_t i) const { return box_.index(cells_[i]); }

NodeSet NodeSet::translated(const Point& shift) const {
    std::vector<Point> pos;
    pos.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        Point p = position(i);
        pos.push_back({box_.wrap(p[0] + shift[0]),
                       box_.dim() == 2 ? box_.wrap(p[1] + shift[1]) : 0.0});
    }
    return NodeSet(box_, pos, labels_);
}

NodeSet NodeSet::merged(const NodeSet& other) const {
    if (box_ != other.box_)
        throw std::invalid_argument("NodeSet::merged: box mismatch");
    std::vector<Point> pos;
    std::vector<int> lab;
    pos.reserve(size() + other.size());
    for (std::size_t i = 0; i < size(); ++i) {
        pos.push_back(position(i));
        lab.push_back(labels_[i]);
    }
    for (std::size_t i = 0; i < other.size(); ++i) {
        pos.push_back(other.position(i));
        lab.push_back(other.labels_[i]);
    }
    return NodeSet(box_, pos, std::move(lab));
}

NodeSet NodeSet::subset(std::span<const std::size_t> indices) const {
    std::vector<Point> pos;
    std::vector<int> lab;
    pos.reserve(indices.size());
    for (std::size_t i : indices) {
        pos.push_back(position(i));
        lab.push_back(labels_[i]);
    }
    return NodeSet(box_, pos, std::move(lab));
}

// --- Weight -----------------------------------------------------------

double Weight::at_dist(double dist) const { return std::pow(1.0 + dist, t_); }

double Weight::at(const Box& box, const Point& p) const {
    return at_dist(box.dist_to_origin(p));
}

double Weight::at_index(const Box& box, long index) const {
    return at(box, box.point(index));
}

ModeratedPair make_moderated_pair(const Box& box, Weight v, Weight w) {
    const long total = box.total_points();
    // Keep the pair scan around a million entries; stride the grid if bigger.
    long stride = 1;
    while ((total / stride) * (total / stride) > 2'000'000L) stride *= 2;
    double c = 1.0;
    const double half = box.side() / 2;
    for (long i = 0; i < total; i += stride) {
        Point x = box.point(i);
        if (box.dist_to_origin(x) > half) continue;
        for (long j = 0; j < total; j += stride) {
            Point y = box.point(j);
            if (box.dist_to_origin(y) > half) continue;
            Point xy{box.wrap(x[0] + y[0]),
                     box.dim() == 2 ? box.wrap(x[1] + y[1]) : 0.0};
            double ratio = v.at(box, xy) / (v.at(box, x) * w.at(box, y));
            c = std::max(c, ratio);
        }
    }
    return ModeratedPair{v, w, c};
}

// --- operations -------------------------------------------------------

int rel_separation(const NodeSet& nodes) {
    if (nodes.empty()) throw std::invalid_argument("empty node set");
    const Box& box = nodes.box();
    const int n = box.points_per_axis();
    // Closed unit cube [x, x+1]: number of grid steps covered per axis.
    int window = static_cast<int>(std::floor(1.0 / box.step() + 1e-9)) + 1;
    window = std::min(window, n);

    if (box.dim() == 1) {
        std::vector<int> occ(n, 0);
        for (std::size_t i = 0; i < nodes.size(); ++i) occ[nodes.grid_index(i)]++;
        int best = 0;
        int sum = 0;
        for (int k = 0; k < window; ++k) sum += occ[k];
        for (int x = 0; x < n; ++x) {
            best = std::max(best, sum);
            sum -= occ[x];
            sum += occ[(x + window) % n];
        }
        return best;
    }

    std::vector<int> occ(static_cast<std::size_t>(n) * n, 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) occ[nodes.grid_index(i)]++;
    // Sliding circular window sums along axis 1, then axis 0.
    std::vector<int> rows(occ.size(), 0);
    for (int i0 = 0; i0 < n; ++i0) {
        int sum = 0;
        for (int k = 0; k < window; ++k) sum += occ[i0 * n + k];
        for (int i1 = 0; i1 < n; ++i1) {
            rows[i0 * n + i1] = sum;
            sum -= occ[i0 * n + i1];
            sum += occ[i0 * n + (i1 + window) % n];
        }
    }
    int best = 0;
    for (int i1 = 0; i1 < n; ++i1) {
        int sum = 0;
        for (int k = 0; k < window; ++k) sum += rows[k * n + i1];
        for (int i0 = 0; i0 < n; ++i0) {
            best = std::max(best, sum);
            sum -= rows[i0 * n + i1];
            sum += rows[((i0 + window) % n) * n + i1];
        }
    }
    return best;
}

double covering_radius(const NodeSet& nodes) {
    if (nodes.empty()) throw std::invalid_argument("empty node set");
    const Box& box = nodes.box();
    std::vector<Point> pos(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) pos[i] = nodes.position(i);
    double worst = 0;
    for (long g = 0; g < box.total_points(); ++g) {
        Point x = box.point(g);
        double best = kInf;
        for (const auto& p : pos) best = std::min(best, box.dist(x, p));
        worst = std::max(worst, best);
    }
    return worst;
}

bool is_L_dense(const NodeSet& nodes, double radius) {
    if (radius <= 0) throw std::invalid_argument("is_L_dense: radius must be > 0");
    return covering_radius(nodes) < radius;
}

double weighted_seq_norm(std::span<const Complex> c, const NodeSet& nodes,
                         double p, const Weight& v) {
    if (c.size() != nodes.size())
        throw std::invalid_argument("weighted_seq_norm: length mismatch");
    if (!(p >= 1.0))
        throw std::invalid_argument("weighted_seq_norm: p must be in [1, inf]");
    const Box& box = nodes.box();
    if (std::isinf(p)) {
        double m = 0;
        for (std::size_t i = 0; i < c.size(); ++i)
            m = std::max(m, std::abs(c[i]) * v.at(box, nodes.position(i)));
        return m;
    }
    double s = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        s += std::pow(std::abs(c[i]) * v.at(box, nodes.position(i)), p);
    return std::pow(s, 1.0 / p);
}

ConvNodesReport conv_nodes_check(const NodeSet& nodes, double t) {
    const Box& box = nodes.box();
    const int d = box.dim();
    if (!(t > d)) throw std::invalid_argument("divergent exponent");
    if (nodes.empty()) throw std::invalid_argument("empty node set");

    ConvNodesReport rep;
    rep.rel = rel_separation(nodes);
    rep.expected_slope = -(t - d);
    Weight w(-t);

    // (a) sum over nodes, torus distance to the origin.
    for (std::size_t i = 0; i < nodes.size(); ++i)
        rep.sum_total += w.at(box, nodes.position(i));
    rep.constant_a = rep.sum_total / rep.rel;

    // (b) tails over the periodic extension, Euclidean distance.
    const double L = box.side();
    const int periods = 32;
    std::vector<double> centered_coords;  // d=1 path below; d=2 handled inline
    rep.tail_radii = {L / 8.0, L / 6.0, L / 4.0};
    for (double M : rep.tail_radii) {
        double s = 0;
        if (d == 1) {
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                double base = box.centered(nodes.position(i)[0]);
                for (int k = -periods; k <= periods; ++k) {
                    double dist = std::abs(base + k * L);
                    if (dist > M) s += w.at_dist(dist);
                }
            }
        } else {
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                double b0 = box.centered(nodes.position(i)[0]);
                double b1 = box.centered(nodes.position(i)[1]);
                for (int k0 = -periods; k0 <= periods; ++k0) {
                    for (int k1 = -periods; k1 <= periods; ++k1) {
                        double dist = std::hypot(b0 + k0 * L, b1 + k1 * L);
                        if (dist > M) s += w.at_dist(dist);
                    }
                }
            }
        }
        rep.tail_sums.push_back(s);
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < rep.tail_radii.size(); ++i) {
        lx.push_back(std::log(rep.tail_radii[i]));
        ly.push_back(std::log(std::max(rep.tail_sums[i], 1e-300)));
    }
    rep.tail_slope = regression_slope(lx, ly);

    // (c) sup over grid x of the discrete subconvolution ratio.
    double sup = 0;
    for (long g = 0; g < box.total_points(); ++g) {
        Point x = box.point(g);
        double s = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            Point gamma = nodes.position(i);
            s += w.at(box, gamma) * w.at_dist(box.dist(x, gamma));
        }
        sup = std::max(sup, s / w.at(box, x));
    }
    rep.sup_ratio = sup;
    rep.constant_c = sup / rep.rel;
    return rep;
}

// --- grid function helpers ---------------------------------------------

Complex inner(const Box& box, const GridFunction& f, const GridFunction& g) {
    return g.dot(f) * box.cell_measure();
}

double l2_norm(const Box& box, const GridFunction& f) {
    return f.norm() * std::sqrt(box.cell_measure());
}

double lp_norm(const Box& box, const GridFunction& f, double p,
               const Weight& v) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be in [1, inf]");
    const long total = box.total_points();
    if (static_cast<long>(f.size()) != total)
        throw std::invalid_argument("lp_norm: grid size mismatch");
    if (std::isinf(p)) {
        double m = 0;
        for (long i = 0; i < total; ++i)
            m = std::max(m, std::abs(f[i]) * v.at_index(box, i));
        return m;
    }
    double s = 0;
    for (long i = 0; i < total; ++i)
        s += std::pow(std::abs(f[i]) * v.at_index(box, i), p);
    return std::pow(s * box.cell_measure(), 1.0 / p);
}

// --- serialization -----------------------------------------------------

std::string node_set_to_json(const NodeSet& nodes, std::optional<Weight> weight) {
    json j;
    const Box& box = nodes.box();
    j["dim"] = box.dim();
    j["side"] = box.side();
    j["points_per_axis"] = box.points_per_axis();
    json pos = json::array();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        Point p = nodes.position(i);
        json entry = json::array();
        for (int a = 0; a < box.dim(); ++a) entry.push_back(p[a]);
        pos.push_back(entry);
    }
    j["positions"] = pos;
    if (weight) j["weight"] = {{"t", weight->exponent()}};
    return j.dump(2);
}

NodeSet node_set_from_json(const std::string& text) {
    json j = json::parse(text);
    Box box(j.at("dim").get<int>(), j.at("side").get<double>(),
            j.at("points_per_axis").get<int>());
    std::vector<Point> pos;
    for (const auto& entry : j.at("positions")) {
        Point p{0, 0};
        for (std::size_t a = 0; a < entry.size() && a < 2; ++a)
            p[a] = entry[a].get<double>();
        pos.push_back(p);
    }
    return NodeSet(box, pos);
}

std::optional<Weight> weight_from_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.contains("weight")) return std::nullopt;
    return Weight(j["weight"].at("t").get<double>());
}

// --- Rng ---------------------------------------------------------------
// xoshiro256** with splitmix64 seeding; pinned so outputs never depend on
// the standard library's distribution implementations.

namespace {
std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return (next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u = 0;
    do { u = uniform(); } while (u == 0.0);
    double v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    have_spare_ = true;
    spare_ = r * std::sin(2 * M_PI * v);
    return r * std::cos(2 * M_PI * v);
}

Complex Rng::normal_complex() {
    double re = normal();
    double im = normal();
    return Complex(re, im) / std::sqrt(2.0);
}

int Rng::uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace frameforge
