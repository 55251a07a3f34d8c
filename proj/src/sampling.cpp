#include "frameforge/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace frameforge {

ReproducingKernel kernel_at(const Point& x0, const FramePair& frame) {
    const Box& box = frame.atoms.box();
    const long idx = box.snap(x0);
    Eigen::VectorXcd dual_values(static_cast<long>(frame.duals.size()));
    for (std::size_t k = 0; k < frame.duals.size(); ++k)
        dual_values[static_cast<long>(k)] = std::conj(frame.duals.atom(k)[idx]);
    return ReproducingKernel{box.point(idx), frame.atoms.matrix() * dual_values};
}

AtomFamily kernel_family(const NodeSet& X, const FramePair& frame) {
    std::vector<GridFunction> kernels;
    kernels.reserve(X.size());
    for (std::size_t i = 0; i < X.size(); ++i)
        kernels.push_back(kernel_at(X.position(i), frame).values);
    return AtomFamily(X, std::move(kernels));
}

SpectrumInfo sampling_bounds(const NodeSet& X, const SpanBasis& span) {
    if (X.empty()) throw std::invalid_argument("empty node set");
    Eigen::MatrixXcd E(static_cast<long>(X.size()), span.dim());
    for (std::size_t i = 0; i < X.size(); ++i)
        E.row(static_cast<long>(i)) = span.basis.row(X.grid_index(i));
    Eigen::MatrixXcd M = E.adjoint() * E;
    SpectrumInfo info = spectrum_of(0.5 * (M + M.adjoint()));
    info.lower = info.eigenvalues.empty() ? 0.0 : std::max(info.eigenvalues.front(), 0.0);
    info.gap = info.lower;
    return info;
}

namespace {

double sampled_norm(const NodeSet& X, const GridFunction& f, double p,
                    const Weight& v) {
    const Box& box = X.box();
    if (std::isinf(p)) {
        double m = 0;
        for (std::size_t i = 0; i < X.size(); ++i)
            m = std::max(m, std::abs(f[X.grid_index(i)]) * v.at(box, X.position(i)));
        return m;
    }
    double s = 0;
    for (std::size_t i = 0; i < X.size(); ++i)
        s += std::pow(std::abs(f[X.grid_index(i)]) * v.at(box, X.position(i)), p);
    return std::pow(s, 1.0 / p);
}

}  // namespace

SamplingResult quilt_sampling(const FramePair& space,
                              std::span<const NodeSet> donor_sets,
                              const Covering& covering,
                              std::span<const double> radii, double p,
                              const Weight& v,
                              const Eigen::MatrixXcd& test_functions) {
    const Box& box = space.atoms.box();
    SamplingResult result;
    SpanBasis span = span_basis(space.atoms);

    // Donor kernel frames with their canonical duals inside the span.
    std::vector<FramePair> donors;
    for (const NodeSet& X : donor_sets) {
        AtomFamily kernels = kernel_family(X, space);
        result.donor_bounds.push_back(sampling_bounds(X, span));
        donors.push_back(exterior_dual(kernels, span));
    }
    PartitionOfUnity pou = build_partition(covering);

    const bool exact_route = (p == 2.0) && v.exponent() == 0.0;
    for (double r : radii) {
        QuiltedSystem quilt = make_quilted(donors, covering, r);
        SamplingRow row;
        row.r = r;
        row.n_points = static_cast<long>(quilt.total_selected());
        if (row.n_points > 0) {
            NodeSet merged = quilt.merged_index();
            if (exact_route) {
                SpectrumInfo bounds = sampling_bounds(merged, span);
                row.lower = std::sqrt(std::max(bounds.lower, 0.0));
                row.upper = std::sqrt(std::max(bounds.upper, 0.0));
            } else {
                double lo = kInf, hi = 0;
                auto probe = [&](const GridFunction& f) {
                    const double denom = lp_norm(box, f, p, v);
                    if (denom <= 0) return;
                    const double ratio = sampled_norm(merged, f, p, v) / denom;
                    lo = std::min(lo, ratio);
                    hi = std::max(hi, ratio);
                };
                for (long m = 0; m < span.dim(); ++m) probe(span.basis.col(m));
                for (long c = 0; c < test_functions.cols(); ++c) probe(test_functions.col(c));
                row.lower = std::isinf(lo) ? 0.0 : lo;
                row.upper = hi;
            }
            double worst = 0;
            for (long c = 0; c < test_functions.cols(); ++c) {
                GridFunction f = test_functions.col(c);
                GridFunction rec = approx_reconstruct(quilt, pou, f);
                const double denom = l2_norm(box, f);
                if (denom > 0) worst = std::max(worst, l2_norm(box, rec - f) / denom);
            }
            row.recon_rel_error = worst;
        } else {
            row.recon_rel_error = 1.0;
        }
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace frameforge
