#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "frameforge/gabor.hpp"
#include "frameforge/surgery.hpp"

namespace frameforge {

/// Separable full-rank lattice A Z^d in a Box together with its dual lattice,
/// both commensurate with the grid. The generator matrix is diagonal with the
/// per-axis steps on the diagonal.
class LatticePair {
public:
    LatticePair(Box box, std::vector<double> steps);

    const Box& box() const { return box_; }
    double step(int axis) const { return steps_[axis]; }
    int count(int axis) const { return counts_[axis]; }          // points per axis
    int dual_count(int axis) const { return dual_counts_[axis]; }
    double volume() const;  // |det A|

    long size() const;        // lattice points in the box
    long fiber_size() const;  // points of the dual fundamental domain
    long dual_size() const;   // dual-lattice translates per fiber

    Point point(long idx) const;
    std::array<long, 2> point_shift_cells(long idx) const;  // shift in grid cells
    /// Node set of the lattice, each point repeated `copies` times
    /// (labels = copy index); ordering is lattice-major, copy-minor.
    NodeSet nodes(int copies = 1) const;

    /// Flattened frequency-grid index of fiber point + dual translate.
    long freq_index(long fiber_idx, long dual_idx) const;

private:
    Box box_;
    std::vector<double> steps_;
    std::vector<int> counts_;
    std::vector<int> dual_counts_;
};

/// Bracket product [f, g]_Lambda(x) = sum_{l in dual lattice}
/// fhat(x + l) conj(ghat(x + l)), one value per fiber point.
GridFunction bracket(const Box& box, const GridFunction& f, const GridFunction& g,
                     const LatticePair& lat);

/// Per-fiber cross-Gram matrices G(x)_{n,m} = [f_n, g_m]_Lambda(x).
struct FiberGram {
    long n_generators = 0;
    std::vector<Eigen::MatrixXcd> fibers;
    double sup_norm = 0;          // sup over fibers of the spectral norm
    double sup_inverse_norm = 0;  // sup of ||G(x)^{-1}||; inf when singular
    std::vector<long> singular_fibers;

    bool uniformly_invertible() const { return singular_fibers.empty(); }
};

FiberGram fiber_gram(const Box& box, std::span<const GridFunction> F,
                     std::span<const GridFunction> G, const LatticePair& lat,
                     double relative_tol = 1e-8);

/// Dual generators of the translate system: per fiber,
/// psi_hat_n = |det A| sum_l [G(x)^{-1}]_{n,l} f_hat_l. Throws on singular
/// fibers.
std::vector<GridFunction> fiber_duals(const Box& box,
                                      std::span<const GridFunction> F,
                                      const FiberGram& cross,
                                      const LatticePair& lat);

/// All lattice translates of the generators as an AtomFamily
/// (lattice-major, generator-minor; node labels carry the generator index).
AtomFamily translate_system(const Box& box, std::span<const GridFunction> generators,
                            const LatticePair& lat);

/// Riesz-sequence verdicts for a generator set: the fiber criterion (uniform
/// invertibility of the fiber Grams) and the direct full-Gram criterion.
struct RieszVerdict {
    bool fiber_invertible = false;
    bool direct_positive = false;
    double min_fiber_eigenvalue = 0;
    double max_fiber_eigenvalue = 0;
    double gram_lower = 0;  // raw smallest eigenvalue of the full Gram
    double gram_upper = 0;
    bool agree() const { return fiber_invertible == direct_positive; }
};

RieszVerdict riesz_verdicts(const Box& box, std::span<const GridFunction> generators,
                            const LatticePair& lat, double relative_tol = 1e-8);

struct SisQuiltRow {
    double r = 0;
    double lower = 0;
    double upper = 0;
    double deviation = 0;
    bool certified = false;
};

struct SisQuiltReport {
    bool refused = false;
    std::string refusal;           // names the singular fiber when refused
    double sup_fiber_norm = 0;     // over donors
    double sup_fiber_inverse_norm = 0;
    SpectrumInfo reference_bounds;
    std::vector<SisQuiltRow> rows;
};

/// Quilts donor lattice-translate systems over a covering of the signal
/// domain. Donor coefficient functionals come from the per-fiber dual
/// construction; any singular fiber refuses certification.
SisQuiltReport quilt_sis(const Box& box, std::span<const GridFunction> reference_gens,
                         const std::vector<std::vector<GridFunction>>& donor_gens,
                         const LatticePair& lat, const Covering& covering,
                         std::span<const double> radii);

// --- Kohn-Nirenberg machinery -------------------------------------------------

struct KNSymbol {
    Box tf_box;
    GridFunction values;
    std::string provenance;
};

/// sigma(P_{f,g})(x, w) = f(x) conj(ghat(w)) e^{-2 pi i x w}.
KNSymbol kn_symbol_rank_one(const Box& signal_box, const GridFunction& f,
                            const GridFunction& g);

/// Circular translate of a TF-grid function by a commensurate TF point.
GridFunction tf_translate(const Box& tf_box, const GridFunction& values,
                          const Point& z);

/// Gabor multiplier sum_n sum_lambda m_n(lambda) P_{pi(lambda) f_n, pi(lambda) g_n}.
struct GaborMultiplier {
    Box signal_box;
    TFLattice lattice;
    std::vector<std::pair<GridFunction, GridFunction>> pairs;  // (f_n, g_n)
    std::vector<Eigen::VectorXcd> masks;                       // per pair, length lattice.size()

    KNSymbol symbol() const;
    /// Materialized operator matrix (oracle for small signal grids).
    Eigen::MatrixXcd operator_matrix() const;
};

/// Frobenius inner product of operator matrices == Hilbert-Schmidt inner
/// product in the grid L^2 structure.
Complex hs_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct RecoveryReport {
    double r = 0;
    long n_rows = 0;
    long n_unknowns = 0;
    double smallest_singular_value = 0;
    double largest_singular_value = 0;
    bool rank_deficient = false;
    std::optional<std::vector<Eigen::VectorXcd>> masks;  // absent when rank-deficient
    double hs_residual = 0;  // relative HS error of the reassembled operator
};

/// Recovers the masks of T from its mixed lower symbol over the quilted index
/// set {(lambda, n, i): d(lambda, E_i) <= r}; ordinary least squares with a
/// full SVD, rank threshold shared with the frame engine (1e-10 relative).
RecoveryReport multiplier_recover(
    const GaborMultiplier& T,
    const std::vector<std::vector<std::pair<GridFunction, GridFunction>>>& probe_pairs,
    const Covering& tf_covering, double r);

}  // namespace frameforge
