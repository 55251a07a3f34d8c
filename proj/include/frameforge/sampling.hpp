#pragma once

#include <span>
#include <vector>

#include "frameforge/surgery.hpp"

namespace frameforge {

struct ReproducingKernel {
    Point x0;
    GridFunction values;  // K_{x0} = sum_k conj(g_k(x0)) f_k, in the span
};

/// Reproducing kernel of the spline-type span at x0 (snapped to the grid):
/// <f, K_{x0}> = f(x0) for f in the span.
ReproducingKernel kernel_at(const Point& x0, const FramePair& frame);

/// The kernel family {K_x : x in X} as an AtomFamily with nodes X.
AtomFamily kernel_family(const NodeSet& X, const FramePair& frame);

/// Point-evaluation bounds over the span: eigenvalues of E^H E for
/// E_{x,m} = b_m(x). The lower bound is the raw smallest eigenvalue.
/// Throws std::invalid_argument("empty node set") on empty X.
SpectrumInfo sampling_bounds(const NodeSet& X, const SpanBasis& span);

struct SamplingRow {
    double r = 0;
    double lower = 0;            // A^r
    double upper = 0;            // B^r
    double recon_rel_error = 0;  // worst over test functions
    long n_points = 0;           // |X^r| with multiplicity
};

struct SamplingResult {
    std::vector<SamplingRow> rows;
    std::vector<SpectrumInfo> donor_bounds;  // per donor sampling bounds (p = 2)
};

/// Quilted sampling: merges the donor sets X_i over the covering at each
/// radius, reports the measured constants of the quilted sampling inequality
/// and the reconstruction error through the quilted kernel frame.
/// For p = 2 and the trivial weight the constants are exact singular-value
/// bounds; otherwise they are measured ratios over span basis + test functions.
SamplingResult quilt_sampling(const FramePair& space,
                              std::span<const NodeSet> donor_sets,
                              const Covering& covering,
                              std::span<const double> radii, double p,
                              const Weight& v,
                              const Eigen::MatrixXcd& test_functions);

}  // namespace frameforge
