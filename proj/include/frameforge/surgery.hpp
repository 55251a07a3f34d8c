#pragma once

#include <span>
#include <vector>

#include "frameforge/frame.hpp"

namespace frameforge {

/// Indexed family of grid-cell regions covering the whole grid, with the
/// bounded-overlap and uniform-local-finiteness statistics.
class Covering {
public:
    /// Throws std::invalid_argument("not a covering") if the union of the
    /// regions misses a grid point.
    Covering(Box box, std::vector<std::vector<long>> regions);

    const Box& box() const { return box_; }
    std::size_t size() const { return regions_.size(); }
    const std::vector<long>& region(std::size_t i) const { return regions_[i]; }
    const std::vector<std::uint8_t>& mask(std::size_t i) const { return masks_[i]; }

    int overlap_count() const { return overlap_count_; }       // #_E
    int local_finiteness() const { return local_finiteness_; } // #_{E,Q}, Q unit cube
    /// #_{E,Q'} with Q' = Q + [-r, r]^d.
    int local_finiteness_widened(double r) const;

private:
    Box box_;
    std::vector<std::vector<long>> regions_;
    std::vector<std::vector<std::uint8_t>> masks_;
    int overlap_count_ = 0;
    int local_finiteness_ = 0;
};

/// Split axis 0 into intervals [lo, hi) (box units, wrap allowed via hi > L).
Covering axis_split_covering(const Box& box, std::span<const std::pair<double, double>> intervals);

/// Nonnegative weights eta_i supported inside E_i with sum_i eta_i == 1.
class PartitionOfUnity {
public:
    explicit PartitionOfUnity(std::vector<Eigen::VectorXd> weights);
    std::size_t size() const { return weights_.size(); }
    const Eigen::VectorXd& weight(std::size_t i) const { return weights_[i]; }

private:
    std::vector<Eigen::VectorXd> weights_;
};

/// Normalized-indicator partition eta_i = chi_{E_i} / sum_j chi_{E_j}.
PartitionOfUnity build_partition(const Covering& covering);

/// Torus distance from each node to the region (min over region cells).
std::vector<double> node_region_distances(const NodeSet& nodes, const Box& box,
                                          std::span<const long> region_cells);

/// Indices of nodes with d(node, region) <= r (closed; boundary ties included).
std::vector<std::size_t> select_node_indices(const NodeSet& nodes, const Box& box,
                                             std::span<const long> region_cells,
                                             double r);

NodeSet select_nodes(const NodeSet& nodes, const Box& box,
                     std::span<const long> region_cells, double r);

/// Donor frames glued over a covering: selection keeps, per donor, exactly the
/// nodes within distance r of the donor's region (Delta_i^r = Lambda_i^r).
struct QuiltedSystem {
    std::vector<FramePair> donors;  // atoms = synthesis, duals = analysis
    Covering covering;
    double radius = 0;
    std::vector<std::vector<std::size_t>> selection;

    /// Gamma^r as a node set with multiplicity; labels carry the donor index.
    NodeSet merged_index() const;
    std::size_t total_selected() const;
};

QuiltedSystem make_quilted(std::vector<FramePair> donors, Covering covering,
                           double r);

/// A^r(f) = sum_i sum_{k in Lambda_i^r} <f, phi^i_k> psi^i_k eta_i, summed in
/// (donor, node) order.
GridFunction approx_reconstruct(const QuiltedSystem& quilt,
                                const PartitionOfUnity& pou,
                                const GridFunction& f);

struct SweepRow {
    double r = 0;
    double p = 0;
    double weight_exponent = 0;
    double worst_rel_error = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double fitted_slope = 0;   // log-log slope over the interior radii
    bool monotone = true;      // errors non-increasing within 10% slack
};

/// Worst relative L^p_v error of A^r over the test functions, per radius.
/// Radii must be strictly increasing with at least 2 entries; test functions
/// are the columns of `test_functions`.
SweepResult error_sweep(const std::vector<FramePair>& donors,
                        const Covering& covering, const PartitionOfUnity& pou,
                        std::span<const double> radii,
                        const Eigen::MatrixXcd& test_functions, double p,
                        const Weight& v);

/// Singular-value bounds of the quilted analysis map restricted to the span:
/// eigenvalues of T^H T for T_{(k,i),m} = <b_m, phi^i_k>. The lower bound is
/// the raw smallest eigenvalue (no thresholding); > 0 certifies the quilted
/// exterior frame at this radius. Throws on an empty quilt.
SpectrumInfo quilted_frame_bounds(const QuiltedSystem& quilt,
                                  const SpanBasis& span);

struct QuiltCertificate {
    double radius = 0;
    double deviation = 0;         // ||A^r - I|| on the span
    double synthesis_norm = 0;    // sigma_max of c -> sum c psi eta
    double analysis_lower = 0;    // lambda_min of T^H T
    double analysis_upper = 0;
    double guaranteed_lower = 0;  // (1 - deviation)^2 / synthesis_norm^2
    bool certified = false;
};

/// A-posteriori invertibility certificate: when ||A^r - I|| < 1 on the span,
/// the quilted analysis lower bound must be >= (1-dev)^2 / synthesis_norm^2.
QuiltCertificate certify_quilt(const QuiltedSystem& quilt,
                               const PartitionOfUnity& pou,
                               const SpanBasis& span);

}  // namespace frameforge
