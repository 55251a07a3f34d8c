#include "frameforge/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace frameforge {

namespace {

// Circular "any set cell in [x - before*h, x + after*h]" dilation of a mask.
std::vector<std::uint8_t> dilate_mask_1d(std::span<const std::uint8_t> mask,
                                         int before, int after) {
    const int n = static_cast<int>(mask.size());
    const int window = std::min(before + after + 1, n);
    std::vector<std::uint8_t> out(n, 0);
    // Sliding-sum over the circular window; positive sum means hit.
    int sum = 0;
    for (int k = 0; k < window; ++k) sum += mask[k];
    for (int start = 0; start < n; ++start) {
        // Window [start, start+window-1] corresponds to anchor x = start+before.
        out[((start + before) % n + n) % n] = sum > 0 ? 1 : 0;
        sum -= mask[start];
        sum += mask[(start + window) % n];
    }
    return out;
}

std::vector<std::uint8_t> dilate_mask(const Box& box,
                                      std::span<const std::uint8_t> mask,
                                      int before, int after) {
    const int n = box.points_per_axis();
    if (box.dim() == 1) return dilate_mask_1d(mask, before, after);
    std::vector<std::uint8_t> rows(mask.size());
    std::vector<std::uint8_t> row(n), tmp;
    for (int i0 = 0; i0 < n; ++i0) {
        std::copy_n(mask.begin() + static_cast<std::size_t>(i0) * n, n, row.begin());
        tmp = dilate_mask_1d(row, before, after);
        std::copy(tmp.begin(), tmp.end(), rows.begin() + static_cast<std::size_t>(i0) * n);
    }
    std::vector<std::uint8_t> out(mask.size());
    std::vector<std::uint8_t> col(n);
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i0 = 0; i0 < n; ++i0) col[i0] = rows[static_cast<std::size_t>(i0) * n + i1];
        tmp = dilate_mask_1d(col, before, after);
        for (int i0 = 0; i0 < n; ++i0) out[static_cast<std::size_t>(i0) * n + i1] = tmp[i0];
    }
    return out;
}

int max_mask_sum(const Box& box, const std::vector<std::vector<std::uint8_t>>& masks) {
    const long total = box.total_points();
    int best = 0;
    for (long x = 0; x < total; ++x) {
        int c = 0;
        for (const auto& m : masks) c += m[x];
        best = std::max(best, c);
    }
    return best;
}

double regression_slope(std::span<const double> x, std::span<const double> y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

// --- Covering -----------------------------------------------------------

Covering::Covering(Box box, std::vector<std::vector<long>> regions)
    : box_(box), regions_(std::move(regions)) {
    const long total = box_.total_points();
    masks_.resize(regions_.size());
    std::vector<int> counts(total, 0);
    for (std::size_t i = 0; i < regions_.size(); ++i) {
        auto& cells = regions_[i];
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        masks_[i].assign(total, 0);
        for (long c : cells) {
            if (c < 0 || c >= total)
                throw std::invalid_argument("Covering: cell index out of range");
            masks_[i][c] = 1;
            counts[c]++;
        }
    }
    for (long x = 0; x < total; ++x)
        if (counts[x] == 0) throw std::invalid_argument("not a covering");
    overlap_count_ = max_mask_sum(box_, masks_);

    // #_{E,Q}: regions meeting the closed unit cube anchored at each grid point.
    const int after = static_cast<int>(std::floor(1.0 / box_.step() + 1e-9));
    std::vector<std::vector<std::uint8_t>> dilated(regions_.size());
    for (std::size_t i = 0; i < regions_.size(); ++i)
        dilated[i] = dilate_mask(box_, masks_[i], 0, after);
    local_finiteness_ = max_mask_sum(box_, dilated);
}

int Covering::local_finiteness_widened(double r) const {
    const int before = static_cast<int>(std::floor(r / box_.step() + 1e-9));
    const int after = static_cast<int>(std::floor((1.0 + r) / box_.step() + 1e-9));
    std::vector<std::vector<std::uint8_t>> dilated(regions_.size());
    for (std::size_t i = 0; i < regions_.size(); ++i)
        dilated[i] = dilate_mask(box_, masks_[i], before, after);
    return max_mask_sum(box_, dilated);
}

Covering axis_split_covering(const Box& box,
                             std::span<const std::pair<double, double>> intervals) {
    std::vector<std::vector<long>> regions;
    for (const auto& [lo, hi] : intervals) {
        std::vector<long> cells;
        for (long i = 0; i < box.total_points(); ++i) {
            const double c = box.point(i)[0];
            const bool inside = (hi <= box.side())
                                    ? (c >= lo && c < hi)
                                    : (c >= lo || c < box.wrap(hi));
            if (inside) cells.push_back(i);
        }
        regions.push_back(std::move(cells));
    }
    return Covering(box, std::move(regions));
}

// --- PartitionOfUnity ------------------------------------------------------

PartitionOfUnity::PartitionOfUnity(std::vector<Eigen::VectorXd> weights)
    : weights_(std::move(weights)) {}

PartitionOfUnity build_partition(const Covering& covering) {
    const long total = covering.box().total_points();
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(total);
    for (std::size_t i = 0; i < covering.size(); ++i)
        for (long x = 0; x < total; ++x) counts[x] += covering.mask(i)[x];
    for (long x = 0; x < total; ++x)
        if (counts[x] == 0) throw std::invalid_argument("not a covering");
    std::vector<Eigen::VectorXd> weights(covering.size());
    for (std::size_t i = 0; i < covering.size(); ++i) {
        weights[i] = Eigen::VectorXd::Zero(total);
        for (long x = 0; x < total; ++x)
            if (covering.mask(i)[x]) weights[i][x] = 1.0 / counts[x];
    }
    return PartitionOfUnity(std::move(weights));
}

// --- node selection ----------------------------------------------------------

std::vector<double> node_region_distances(const NodeSet& nodes, const Box& box,
                                          std::span<const long> region_cells) {
    std::vector<Point> cell_points;
    cell_points.reserve(region_cells.size());
    for (long c : region_cells) cell_points.push_back(box.point(c));
    std::vector<double> out(nodes.size(), kInf);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Point p = nodes.position(k);
        double best = kInf;
        for (const auto& q : cell_points) best = std::min(best, box.dist(p, q));
        out[k] = best;
    }
    return out;
}

std::vector<std::size_t> select_node_indices(const NodeSet& nodes, const Box& box,
                                             std::span<const long> region_cells,
                                             double r) {
    if (r < 0) throw std::invalid_argument("select_nodes: r must be >= 0");
    auto dist = node_region_distances(nodes, box, region_cells);
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        if (dist[k] <= r + 1e-12) out.push_back(k);
    return out;
}

NodeSet select_nodes(const NodeSet& nodes, const Box& box,
                     std::span<const long> region_cells, double r) {
    auto idx = select_node_indices(nodes, box, region_cells, r);
    return nodes.subset(idx);
}

// --- QuiltedSystem ------------------------------------------------------------

NodeSet QuiltedSystem::merged_index() const {
    const Box& box = covering.box();
    std::vector<Point> pos;
    std::vector<int> labels;
    for (std::size_t i = 0; i < donors.size(); ++i) {
        const NodeSet& nodes = donors[i].duals.nodes();
        for (std::size_t k : selection[i]) {
            pos.push_back(nodes.position(k));
            labels.push_back(static_cast<int>(i));
        }
    }
    return NodeSet(box, pos, std::move(labels));
}

std::size_t QuiltedSystem::total_selected() const {
    std::size_t n = 0;
    for (const auto& s : selection) n += s.size();
    return n;
}

QuiltedSystem make_quilted(std::vector<FramePair> donors, Covering covering,
                           double r) {
    if (donors.size() != covering.size())
        throw std::invalid_argument("make_quilted: donor/region count mismatch");
    QuiltedSystem q{std::move(donors), std::move(covering), r, {}};
    q.selection.resize(q.donors.size());
    for (std::size_t i = 0; i < q.donors.size(); ++i) {
        if (q.donors[i].duals.box() != q.covering.box())
            throw std::invalid_argument("make_quilted: donor box differs from covering box");
        q.selection[i] = select_node_indices(q.donors[i].duals.nodes(), q.covering.box(),
                                             q.covering.region(i), r);
    }
    return q;
}

GridFunction approx_reconstruct(const QuiltedSystem& quilt,
                                const PartitionOfUnity& pou,
                                const GridFunction& f) {
    const Box& box = quilt.covering.box();
    GridFunction out = GridFunction::Zero(box.total_points());
    for (std::size_t i = 0; i < quilt.donors.size(); ++i) {
        const auto& sel = quilt.selection[i];
        if (sel.empty()) continue;
        const Eigen::MatrixXcd& phi = quilt.donors[i].duals.matrix();
        const Eigen::MatrixXcd& psi = quilt.donors[i].atoms.matrix();
        Eigen::VectorXcd coeff(static_cast<long>(sel.size()));
        for (std::size_t s = 0; s < sel.size(); ++s)
            coeff[static_cast<long>(s)] =
                phi.col(static_cast<long>(sel[s])).dot(f) * box.cell_measure();
        GridFunction local = GridFunction::Zero(box.total_points());
        for (std::size_t s = 0; s < sel.size(); ++s)
            local += coeff[static_cast<long>(s)] * psi.col(static_cast<long>(sel[s]));
        out += local.cwiseProduct(pou.weight(i).cast<Complex>());
    }
    return out;
}

SweepResult error_sweep(const std::vector<FramePair>& donors,
                        const Covering& covering, const PartitionOfUnity& pou,
                        std::span<const double> radii,
                        const Eigen::MatrixXcd& test_functions, double p,
                        const Weight& v) {
    if (radii.size() < 2)
        throw std::invalid_argument("error_sweep: need at least 2 radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw std::invalid_argument("error_sweep: radii must be strictly increasing");

    const Box& box = covering.box();
    SweepResult result;
    for (double r : radii) {
        QuiltedSystem q = make_quilted(donors, covering, r);
        double worst = 0;
        for (long c = 0; c < test_functions.cols(); ++c) {
            GridFunction f = test_functions.col(c);
            GridFunction rec = approx_reconstruct(q, pou, f);
            const double denom = lp_norm(box, f, p, v);
            const double err = denom > 0 ? lp_norm(box, rec - f, p, v) / denom : 0.0;
            worst = std::max(worst, err);
        }
        result.rows.push_back({r, p, v.exponent(), worst});
    }
    // Slope over the interior radii (for five radii: the middle three).
    std::vector<double> lx, ly;
    for (std::size_t i = 1; i + 1 < result.rows.size(); ++i) {
        lx.push_back(std::log(result.rows[i].r));
        ly.push_back(std::log(std::max(result.rows[i].worst_rel_error, 1e-300)));
    }
    if (lx.size() >= 2) result.fitted_slope = regression_slope(lx, ly);
    for (std::size_t i = 1; i < result.rows.size(); ++i)
        if (result.rows[i].worst_rel_error >
            result.rows[i - 1].worst_rel_error * 1.1 + 1e-12)
            result.monotone = false;
    return result;
}

namespace {

// Quilted analysis matrix T_{(k,i),m} = <b_m, phi^i_k>.
Eigen::MatrixXcd analysis_matrix(const QuiltedSystem& quilt, const SpanBasis& span) {
    const Box& box = quilt.covering.box();
    const std::size_t rows = quilt.total_selected();
    Eigen::MatrixXcd T(static_cast<long>(rows), span.dim());
    long row = 0;
    for (std::size_t i = 0; i < quilt.donors.size(); ++i) {
        const Eigen::MatrixXcd& phi = quilt.donors[i].duals.matrix();
        for (std::size_t k : quilt.selection[i]) {
            T.row(row++) =
                (phi.col(static_cast<long>(k)).adjoint() * span.basis) * box.cell_measure();
        }
    }
    return T;
}

}  // namespace

SpectrumInfo quilted_frame_bounds(const QuiltedSystem& quilt, const SpanBasis& span) {
    if (quilt.total_selected() == 0) throw std::invalid_argument("empty quilt");
    if (span.box != quilt.covering.box())
        throw std::invalid_argument("quilted_frame_bounds: box mismatch");
    Eigen::MatrixXcd T = analysis_matrix(quilt, span);
    Eigen::MatrixXcd M = T.adjoint() * T;
    SpectrumInfo info = spectrum_of(0.5 * (M + M.adjoint()));
    // Restricted to the span: every direction counts, so the reported lower
    // bound is the raw smallest eigenvalue.
    info.lower = std::max(info.eigenvalues.empty() ? 0.0 : info.eigenvalues.front(), 0.0);
    info.gap = info.lower;
    return info;
}

QuiltCertificate certify_quilt(const QuiltedSystem& quilt,
                               const PartitionOfUnity& pou,
                               const SpanBasis& span) {
    const Box& box = quilt.covering.box();
    QuiltCertificate cert;
    cert.radius = quilt.radius;

    // Deviation ||A^r - I|| restricted to the span.
    Eigen::MatrixXcd dev(span.basis.rows(), span.dim());
    for (long m = 0; m < span.dim(); ++m) {
        GridFunction b = span.basis.col(m);
        dev.col(m) = approx_reconstruct(quilt, pou, b) - b;
    }
    Eigen::MatrixXcd dd = dev.adjoint() * dev * box.cell_measure();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (dd + dd.adjoint()));
    cert.deviation = std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));

    // Synthesis-side constant: operator norm of c -> sum c_(k,i) psi^i_k eta_i.
    const std::size_t cols = quilt.total_selected();
    if (cols > 0) {
        Eigen::MatrixXcd U(box.total_points(), static_cast<long>(cols));
        long col = 0;
        for (std::size_t i = 0; i < quilt.donors.size(); ++i) {
            const Eigen::MatrixXcd& psi = quilt.donors[i].atoms.matrix();
            const auto eta = pou.weight(i).cast<Complex>();
            for (std::size_t k : quilt.selection[i])
                U.col(col++) = psi.col(static_cast<long>(k)).cwiseProduct(eta);
        }
        Eigen::MatrixXcd uu = U.adjoint() * U * box.cell_measure();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> us(0.5 * (uu + uu.adjoint()));
        cert.synthesis_norm = std::sqrt(std::max(us.eigenvalues().maxCoeff(), 0.0));

        SpectrumInfo bounds = quilted_frame_bounds(quilt, span);
        cert.analysis_lower = bounds.lower;
        cert.analysis_upper = bounds.upper;
    }

    if (cert.deviation < 1.0 && cert.synthesis_norm > 0) {
        cert.guaranteed_lower = (1.0 - cert.deviation) * (1.0 - cert.deviation) /
                                (cert.synthesis_norm * cert.synthesis_norm);
        cert.certified = cert.analysis_lower > 0 &&
                         cert.analysis_lower >= cert.guaranteed_lower * (1.0 - 1e-9);
    }
    return cert;
}

}  // namespace frameforge
