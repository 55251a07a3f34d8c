#include "frameforge/frame.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace frameforge {

SchurMatrix gram(const AtomFamily& family) {
    SchurMatrix c = cross_correlation(family, family);
    Eigen::MatrixXcd entries = 0.5 * (c.entries() + c.entries().adjoint());
    return SchurMatrix(std::move(entries), family.nodes(), family.nodes());
}

SpectrumInfo spectrum_of(const Eigen::MatrixXcd& hermitian,
                         double relative_rank_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian);
    SpectrumInfo info;
    info.eigenvalues.assign(es.eigenvalues().data(),
                            es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(info.eigenvalues.begin(), info.eigenvalues.end());
    info.upper = info.eigenvalues.empty() ? 0.0 : info.eigenvalues.back();
    info.rank_threshold = relative_rank_threshold * std::max(info.upper, 0.0);
    info.lower = 0;
    for (double ev : info.eigenvalues) {
        if (ev > info.rank_threshold) {
            if (info.rank == 0) info.lower = ev;
            ++info.rank;
        }
    }
    info.gap = info.lower;
    return info;
}

SpectrumInfo frame_bounds(const AtomFamily& family,
                          double relative_rank_threshold) {
    if (family.size() == 0 || family.matrix().norm() == 0)
        throw std::invalid_argument("zero family");
    return spectrum_of(gram(family).entries(), relative_rank_threshold);
}

Eigen::MatrixXcd pseudo_inverse_svd(const Eigen::MatrixXcd& M,
                                    double rank_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    Eigen::VectorXd inv = es.eigenvalues();
    for (long i = 0; i < inv.size(); ++i)
        inv[i] = inv[i] > rank_threshold ? 1.0 / inv[i] : 0.0;
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev-based initial guess.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p0 = 0, p1 = 0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1);
            }
            double dp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                p0 = 1.0;
                p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1);
                }
                break;
            }
        }
        double dp = n * (x * p0 - p1) / (x * x - 1.0);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

Eigen::MatrixXcd pseudo_inverse_contour(const Eigen::MatrixXcd& M,
                                        double spectral_gap, int num_quad) {
    if (num_quad < 8)
        throw std::invalid_argument("pseudo_inverse_contour: num_quad must be >= 8 per side");
    const double A = spectral_gap;
    if (!(A > 0))
        throw std::invalid_argument("pseudo_inverse_contour: spectral gap must be > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    const double norm = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
    const double zero_floor = std::max(norm, A) * 1e-12;
    for (long i = 0; i < es.eigenvalues().size(); ++i) {
        const double ev = es.eigenvalues()[i];
        if (ev > zero_floor && ev < A * (1.0 - 1e-9))
            throw std::invalid_argument("spectral gap violated");
    }

    const long n = M.rows();
    const Complex corners[4] = {Complex(A / 2, -1.0), Complex(norm + A / 2, -1.0),
                                Complex(norm + A / 2, 1.0), Complex(A / 2, 1.0)};
    std::vector<double> gx, gw;
    gauss_legendre(num_quad, gx, gw);

    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n, n);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    for (int side = 0; side < 4; ++side) {
        const Complex za = corners[side];
        const Complex zb = corners[(side + 1) % 4];
        for (int q = 0; q < num_quad; ++q) {
            const double t = 0.5 * (gx[q] + 1.0);
            const Complex z = za + t * (zb - za);
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(z * I - M);
            total += (0.5 * gw[q] * (zb - za) / z) * lu.solve(I);
        }
    }
    return total / Complex(0.0, 2.0 * M_PI);
}

FramePair canonical_dual(const AtomFamily& family) {
    SpectrumInfo bounds = frame_bounds(family);
    SchurMatrix g = gram(family);
    Eigen::MatrixXcd d = pseudo_inverse_svd(g.entries(), bounds.rank_threshold);
    AtomFamily duals =
        matrix_apply(SchurMatrix(std::move(d), family.nodes(), family.nodes()), family);
    return FramePair{family, std::move(duals), bounds.lower, bounds.upper};
}

SpanBasis span_basis(const AtomFamily& family, double relative_rank_threshold) {
    SchurMatrix g = gram(family);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.entries());
    const double upper = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
    const double thr = relative_rank_threshold * upper;
    std::vector<long> keep;
    for (long i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] > thr) keep.push_back(i);
    if (keep.empty()) throw std::invalid_argument("zero family");
    Eigen::MatrixXcd basis(family.matrix().rows(), static_cast<long>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        basis.col(static_cast<long>(j)) =
            family.matrix() * es.eigenvectors().col(keep[j]) /
            std::sqrt(es.eigenvalues()[keep[j]]);
    return SpanBasis{family.box(), std::move(basis)};
}

SpanBasis full_space_basis(const Box& box) {
    const long total = box.total_points();
    Eigen::MatrixXcd basis = Eigen::MatrixXcd::Identity(total, total) /
                             std::sqrt(box.cell_measure());
    return SpanBasis{box, std::move(basis)};
}

GridFunction project_onto(const SpanBasis& span, const GridFunction& f) {
    return span.basis * (span.basis.adjoint() * f * span.box.cell_measure());
}

FramePair exterior_dual(const AtomFamily& analysis_atoms, const SpanBasis& span) {
    if (analysis_atoms.box() != span.box)
        throw std::invalid_argument("exterior_dual: box mismatch");
    Eigen::MatrixXcd projected =
        span.basis *
        (span.basis.adjoint() * analysis_atoms.matrix() * span.box.cell_measure());
    std::vector<GridFunction> proj_atoms;
    proj_atoms.reserve(analysis_atoms.size());
    for (long k = 0; k < projected.cols(); ++k) proj_atoms.push_back(projected.col(k));
    AtomFamily projected_family(analysis_atoms.nodes(), std::move(proj_atoms));
    SpectrumInfo bounds = frame_bounds(projected_family);
    if (bounds.rank < span.dim())
        throw std::invalid_argument(
            "exterior_dual: donor is not a frame for the span (projected rank " +
            std::to_string(bounds.rank) + " < " + std::to_string(span.dim()) + ")");
    Eigen::MatrixXcd d =
        pseudo_inverse_svd(gram(projected_family).entries(), bounds.rank_threshold);
    AtomFamily synthesis = matrix_apply(
        SchurMatrix(std::move(d), projected_family.nodes(), projected_family.nodes()),
        projected_family);
    return FramePair{std::move(synthesis), analysis_atoms, bounds.lower, bounds.upper};
}

DecayFit decay_fit(const AtomFamily& family) {
    const Box& box = family.box();
    if (family.size() == 0 || family.matrix().norm() == 0)
        throw std::invalid_argument("zero family");
    const int max_annulus = static_cast<int>(std::floor(box.side() / 2.0));
    const long total = box.total_points();

    std::vector<double> xs, ys;
    std::vector<bool> annulus_seen(max_annulus, false);
    for (std::size_t k = 0; k < family.size(); ++k) {
        const Point node = family.nodes().position(k);
        std::vector<double> annulus_max(max_annulus, 0.0);
        std::vector<bool> annulus_hit(max_annulus, false);
        for (long i = 0; i < total; ++i) {
            const double dist = box.dist(box.point(i), node);
            const int m = static_cast<int>(std::floor(dist));
            if (m >= max_annulus) continue;
            annulus_hit[m] = true;
            annulus_max[m] = std::max(annulus_max[m], std::abs(family.atom(k)[i]));
        }
        for (int m = 0; m < max_annulus; ++m) {
            if (!annulus_hit[m] || annulus_max[m] <= 0) continue;
            annulus_seen[m] = true;
            xs.push_back(std::log(1.0 + m));
            ys.push_back(std::log(annulus_max[m]));
        }
    }
    int used = 0;
    for (bool b : annulus_seen) used += b ? 1 : 0;
    if (used < 3) throw std::invalid_argument("insufficient radial range");

    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    DecayFit fit;
    fit.exponent = -slope;
    fit.constant = std::exp(my - slope * mx);
    fit.annuli_used = used;
    return fit;
}

Eigen::MatrixXcd universal_projector(const FramePair& pair) {
    return pair.atoms.matrix() * pair.duals.matrix().adjoint() *
           pair.atoms.box().cell_measure();
}

}  // namespace frameforge
