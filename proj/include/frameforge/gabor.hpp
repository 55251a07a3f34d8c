#pragma once

#include <span>
#include <vector>

#include "frameforge/surgery.hpp"

namespace frameforge {

/// Unit-L2 Gaussian pi^{-d/4} e^{-|x|^2/2} sampled at centered representatives.
GridFunction gauss_window(const Box& signal_box);

/// Separable time-frequency lattice on a 1-d signal box. Steps and offsets
/// must be commensurate with the signal grid (time: multiples of h, frequency:
/// multiples of 1/L) so that every shift is exact.
class TFLattice {
public:
    TFLattice(Box signal_box, double time_step, double freq_step,
              double time_offset = 0.0, double freq_offset = 0.0);

    const Box& signal_box() const { return signal_box_; }
    double time_step() const { return time_step_; }
    double freq_step() const { return freq_step_; }
    int time_count() const { return n_time_; }
    int freq_count() const { return n_freq_; }
    long size() const { return static_cast<long>(n_time_) * n_freq_; }
    double density() const { return time_step_ * freq_step_; }  // a*b

    Point point(long idx) const;  // (x, w), idx = time-major

    /// The time-frequency plane as a 2-d Box; requires N == L^2 so both axes
    /// share the side L and the step h.
    Box tf_box() const;
    NodeSet tf_nodes() const;

private:
    Box signal_box_;
    double time_step_, freq_step_, time_offset_, freq_offset_;
    int n_time_, n_freq_;
};

/// pi(x, w) g = M_w T_x g via exact circular shift and exact phase.
GridFunction tf_atom(const Box& signal_box, const Point& lambda,
                     const GridFunction& g);

struct STFTImage {
    Box tf_box;
    GridFunction values;  // flat, time axis slowest
};

/// V_phi f(x, w) = <f, M_w T_x phi> on the full TF grid.
STFTImage stft(const Box& signal_box, const GridFunction& f,
               const GridFunction& window);

/// Eigen-bounds of the frame operator S = sum_lambda <., pi(lambda) g> pi(lambda) g
/// on the signal grid. A zero window yields the zero operator (A = B = 0).
SpectrumInfo gabor_frame_bounds(const TFLattice& lattice, const GridFunction& g);

/// A donor system for TF-plane surgery: signal-domain atoms with their
/// time-frequency nodes.
struct GaborMolecules {
    NodeSet tf_nodes;                       // on the TF box
    std::vector<GridFunction> signal_atoms;
};

GaborMolecules gabor_system(const TFLattice& lattice, const GridFunction& window);

/// Everything radius-independent of a quilted-Gabor experiment: TF-side donor
/// frame pairs (duals computed on the signal side and mapped through the
/// STFT), per-donor signal frame bounds, and the STFT-image span basis.
struct GaborQuiltSetup {
    Box signal_box;
    Box tf_box;
    std::vector<FramePair> tf_donors;
    std::vector<GaborMolecules> donors;
    std::vector<SpectrumInfo> donor_signal_bounds;
    SpanBasis tf_span;
};

/// Builds the setup; each donor must be a frame for the signal space and each
/// donor atom must obey the uniform TF envelope |V_phi g^i_k| <=
/// C (1 + |z - k|)^{-e} (violations throw, naming atom and grid point).
GaborQuiltSetup prepare_gabor_quilt(const Box& signal_box,
                                    std::vector<GaborMolecules> donors,
                                    const Envelope& tf_envelope);

struct GaborQuiltResult {
    QuiltedSystem quilt;
    SpectrumInfo tf_bounds;       // quilted analysis bounds on the STFT side
    SpectrumInfo signal_bounds;   // direct signal-side quilted bounds
    QuiltCertificate certificate;
};

/// Certifies the quilted Gabor system at radius r over a TF covering, both on
/// the STFT side (via surgery) and directly on the signal side; the two agree
/// because the STFT is an isometry.
GaborQuiltResult quilt_gabor(const GaborQuiltSetup& setup,
                             const Covering& tf_covering,
                             const PartitionOfUnity& pou, double r);

}  // namespace frameforge
