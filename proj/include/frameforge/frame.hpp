#pragma once

#include <vector>

#include "frameforge/amalgam.hpp"
#include "frameforge/grid.hpp"

namespace frameforge {

struct SpectrumInfo {
    std::vector<double> eigenvalues;  // ascending, full spectrum
    int rank = 0;                     // count above rank_threshold
    double lower = 0;                 // A: smallest eigenvalue above threshold
    double upper = 0;                 // B: largest eigenvalue
    double gap = 0;                   // distance from 0 to the smallest nonzero
    double rank_threshold = 0;
};

/// Frame pair (atoms, duals): reconstruction f = sum_k <f, dual_k> atom_k
/// holds on the span of the atoms.
struct FramePair {
    AtomFamily atoms;
    AtomFamily duals;
    double lower = 0;  // A
    double upper = 0;  // B
};

/// Orthonormal basis (w.r.t. the h^d grid inner product) of a family's span;
/// columns of `basis` are the basis vectors as grid functions.
struct SpanBasis {
    Box box;
    Eigen::MatrixXcd basis;
    long dim() const { return basis.cols(); }
};

/// Self-correlation matrix c_{kj} = <f_k, f_j>; Hermitian PSD.
SchurMatrix gram(const AtomFamily& family);

/// Eigen-decomposition of gram(F). A and B are the frame-sequence bounds of
/// span(F). Throws std::invalid_argument("zero family") on an all-zero family.
SpectrumInfo frame_bounds(const AtomFamily& family,
                          double relative_rank_threshold = 1e-10);

SpectrumInfo spectrum_of(const Eigen::MatrixXcd& hermitian,
                         double relative_rank_threshold = 1e-10);

/// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix via spectral
/// decomposition; eigenvalues at or below the threshold are zeroed.
Eigen::MatrixXcd pseudo_inverse_svd(const Eigen::MatrixXcd& M,
                                    double rank_threshold);

/// Contour-integral pseudo-inverse: (1/2 pi i) oint (1/z)(zI - M)^{-1} dz over
/// the rectangle with vertices A/2 +- i and ||M|| + A/2 +- i, anti-clockwise,
/// with num_quad Gauss-Legendre nodes per side. Requires the nonzero spectrum
/// to lie in [A, ||M||]; throws std::invalid_argument("spectral gap violated")
/// when an eigenvalue falls inside (0, A).
Eigen::MatrixXcd pseudo_inverse_contour(const Eigen::MatrixXcd& M,
                                        double spectral_gap, int num_quad = 64);

/// Canonical dual family: duals = pinv(gram(F)) . F. For a Riesz basis the
/// pair is biorthogonal.
FramePair canonical_dual(const AtomFamily& family);

/// Canonical dual of an exterior frame within the given span: atoms are the
/// synthesis family (pinv-Gram combination of the projected analysis atoms),
/// duals are the original analysis atoms.
FramePair exterior_dual(const AtomFamily& analysis_atoms, const SpanBasis& span);

SpanBasis span_basis(const AtomFamily& family,
                     double relative_rank_threshold = 1e-10);
SpanBasis full_space_basis(const Box& box);

struct DecayFit {
    double constant = 0;   // C_fit
    double exponent = 0;   // s_fit
    int annuli_used = 0;
};

/// Least-squares fit of log (annulus max of |f_k|) against -s log(1 + m) over
/// unit annuli m <= L/2, pooled over atoms. Throws
/// std::invalid_argument("insufficient radial range") below 3 nonempty annuli.
DecayFit decay_fit(const AtomFamily& family);

/// Matrix of the projector f -> sum_k <f, dual_k> atom_k on the grid.
Eigen::MatrixXcd universal_projector(const FramePair& pair);

/// Project a grid function onto a span.
GridFunction project_onto(const SpanBasis& span, const GridFunction& f);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace frameforge
