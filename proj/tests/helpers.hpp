#pragma once

#include <vector>

#include "frameforge/amalgam.hpp"
#include "frameforge/grid.hpp"

namespace testutil {

using namespace frameforge;

inline GridFunction bump(const Box& box, const Point& node, double width) {
    GridFunction f(box.total_points());
    for (long i = 0; i < box.total_points(); ++i) {
        const double d = box.dist(box.point(i), node);
        f[i] = std::exp(-0.5 * (d / width) * (d / width));
    }
    return f;
}

inline GridFunction poly_bump(const Box& box, const Point& node, double exponent) {
    GridFunction f(box.total_points());
    for (long i = 0; i < box.total_points(); ++i)
        f[i] = std::pow(1.0 + box.dist(box.point(i), node), -exponent);
    return f;
}

inline NodeSet integer_nodes(const Box& box, double spacing = 1.0, double offset = 0.0) {
    std::vector<Point> pos;
    const int count = static_cast<int>(std::lround(box.side() / spacing));
    for (int i = 0; i < count; ++i) pos.push_back({box.wrap(offset + i * spacing), 0});
    return NodeSet(box, pos);
}

inline AtomFamily bump_family(const Box& box, double width = 0.8, double spacing = 1.0,
                              double offset = 0.0,
                              std::optional<Envelope> env = std::nullopt) {
    NodeSet nodes = integer_nodes(box, spacing, offset);
    std::vector<GridFunction> atoms;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        atoms.push_back(bump(box, nodes.position(k), width));
    return AtomFamily(nodes, atoms, env);
}

inline AtomFamily poly_family(const Box& box, double exponent, double spacing = 1.0,
                              double offset = 0.0, bool declare = true) {
    NodeSet nodes = integer_nodes(box, spacing, offset);
    std::vector<GridFunction> atoms;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        atoms.push_back(poly_bump(box, nodes.position(k), exponent));
    std::optional<Envelope> env;
    if (declare) env = Envelope{1.0 + 1e-9, exponent};
    return AtomFamily(nodes, atoms, env);
}

// Orthonormal indicator atoms on distinct grid cells (h^d inner product).
inline AtomFamily indicator_family(const Box& box, const std::vector<long>& cells) {
    std::vector<Point> pos;
    std::vector<GridFunction> atoms;
    const double scale = 1.0 / std::sqrt(box.cell_measure());
    for (long c : cells) {
        pos.push_back(box.point(c));
        GridFunction f = GridFunction::Zero(box.total_points());
        f[c] = scale;
        atoms.push_back(f);
    }
    return AtomFamily(NodeSet(box, pos), atoms);
}

inline Eigen::MatrixXcd random_span(const AtomFamily& family, int count, Rng& rng) {
    Eigen::MatrixXcd out(family.box().total_points(), count);
    for (int c = 0; c < count; ++c) {
        Eigen::VectorXcd coeff(static_cast<long>(family.size()));
        for (long k = 0; k < coeff.size(); ++k) coeff[k] = rng.normal_complex();
        out.col(c) = family.matrix() * coeff;
    }
    return out;
}

inline GridFunction random_function(const Box& box, Rng& rng) {
    GridFunction f(box.total_points());
    for (long i = 0; i < f.size(); ++i) f[i] = rng.normal_complex();
    return f;
}

}  // namespace testutil
