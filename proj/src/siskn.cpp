#include "frameforge/siskn.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "frameforge/fft.hpp"

namespace frameforge {

// --- LatticePair ---------------------------------------------------------

LatticePair::LatticePair(Box box, std::vector<double> steps)
    : box_(box), steps_(std::move(steps)) {
    if (static_cast<int>(steps_.size()) != box_.dim())
        throw std::invalid_argument("LatticePair: one step per axis required");
    const double h = box_.step();
    for (double a : steps_) {
        if (!(a > 0)) throw std::invalid_argument("LatticePair: steps must be positive");
        const double cells = a / h;
        if (std::abs(cells - std::lround(cells)) > 1e-9)
            throw std::invalid_argument("incommensurate lattice");
        const double per_axis = box_.side() / a;
        if (std::abs(per_axis - std::lround(per_axis)) > 1e-9)
            throw std::invalid_argument("incommensurate lattice");
        counts_.push_back(static_cast<int>(std::lround(per_axis)));
        dual_counts_.push_back(static_cast<int>(std::lround(cells)));
    }
}

double LatticePair::volume() const {
    double v = 1;
    for (double a : steps_) v *= a;
    return v;
}

long LatticePair::size() const {
    long n = 1;
    for (int c : counts_) n *= c;
    return n;
}

long LatticePair::fiber_size() const { return size(); }

long LatticePair::dual_size() const {
    long n = 1;
    for (int c : dual_counts_) n *= c;
    return n;
}

Point LatticePair::point(long idx) const {
    Point p{0, 0};
    if (box_.dim() == 1) {
        p[0] = box_.wrap(idx * steps_[0]);
    } else {
        const long i0 = idx / counts_[1];
        const long i1 = idx % counts_[1];
        p[0] = box_.wrap(i0 * steps_[0]);
        p[1] = box_.wrap(i1 * steps_[1]);
    }
    return p;
}

std::array<long, 2> LatticePair::point_shift_cells(long idx) const {
    std::array<long, 2> s{0, 0};
    const double h = box_.step();
    if (box_.dim() == 1) {
        s[0] = std::lround(point(idx)[0] / h);
    } else {
        const Point p = point(idx);
        s[0] = std::lround(p[0] / h);
        s[1] = std::lround(p[1] / h);
    }
    return s;
}

NodeSet LatticePair::nodes(int copies) const {
    std::vector<Point> pos;
    std::vector<int> labels;
    pos.reserve(size() * copies);
    for (long i = 0; i < size(); ++i)
        for (int c = 0; c < copies; ++c) {
            pos.push_back(point(i));
            labels.push_back(c);
        }
    return NodeSet(box_, pos, std::move(labels));
}

long LatticePair::freq_index(long fiber_idx, long dual_idx) const {
    const int n = box_.points_per_axis();
    if (box_.dim() == 1) {
        // Fibers step through [0, n0); dual translates stride by n0.
        return fiber_idx + dual_idx * counts_[0];
    }
    const long f0 = fiber_idx / counts_[1];
    const long f1 = fiber_idx % counts_[1];
    const long d0 = dual_idx / dual_counts_[1];
    const long d1 = dual_idx % dual_counts_[1];
    const long m0 = f0 + d0 * counts_[0];
    const long m1 = f1 + d1 * counts_[1];
    return m0 * n + m1;
}

// --- bracket / fibers -------------------------------------------------------

GridFunction bracket(const Box& box, const GridFunction& f, const GridFunction& g,
                     const LatticePair& lat) {
    if (lat.box() != box) throw std::invalid_argument("bracket: box mismatch");
    const GridFunction fh = fourier_hat(box, f);
    const GridFunction gh = fourier_hat(box, g);
    GridFunction out(lat.fiber_size());
    for (long x = 0; x < lat.fiber_size(); ++x) {
        Complex s = 0;
        for (long k = 0; k < lat.dual_size(); ++k) {
            const long m = lat.freq_index(x, k);
            s += fh[m] * std::conj(gh[m]);
        }
        out[x] = s;
    }
    return out;
}

FiberGram fiber_gram(const Box& box, std::span<const GridFunction> F,
                     std::span<const GridFunction> G, const LatticePair& lat,
                     double relative_tol) {
    if (F.size() != G.size())
        throw std::invalid_argument("fiber_gram: generator counts differ");
    const long ng = static_cast<long>(F.size());
    FiberGram fg;
    fg.n_generators = ng;
    std::vector<GridFunction> brackets(ng * ng);
    for (long n = 0; n < ng; ++n)
        for (long m = 0; m < ng; ++m)
            brackets[n * ng + m] = bracket(box, F[n], G[m], lat);

    fg.fibers.resize(lat.fiber_size());
    double global_max = 0;
    std::vector<double> fiber_min(lat.fiber_size(), 0.0);
    for (long x = 0; x < lat.fiber_size(); ++x) {
        Eigen::MatrixXcd m(ng, ng);
        for (long a = 0; a < ng; ++a)
            for (long b = 0; b < ng; ++b) m(a, b) = brackets[a * ng + b][x];
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
        const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        const double smin =
            svd.singularValues().size() ? svd.singularValues()(svd.singularValues().size() - 1) : 0.0;
        global_max = std::max(global_max, smax);
        fiber_min[x] = smin;
        fg.sup_norm = std::max(fg.sup_norm, smax);
        fg.fibers[x] = std::move(m);
    }
    for (long x = 0; x < lat.fiber_size(); ++x) {
        if (fiber_min[x] <= relative_tol * global_max) {
            fg.singular_fibers.push_back(x);
            fg.sup_inverse_norm = kInf;
        } else if (!std::isinf(fg.sup_inverse_norm)) {
            fg.sup_inverse_norm = std::max(fg.sup_inverse_norm, 1.0 / fiber_min[x]);
        }
    }
    return fg;
}

std::vector<GridFunction> fiber_duals(const Box& box,
                                      std::span<const GridFunction> F,
                                      const FiberGram& cross,
                                      const LatticePair& lat) {
    if (!cross.uniformly_invertible()) {
        std::ostringstream msg;
        msg << "fiber_duals: singular fiber at index " << cross.singular_fibers.front();
        throw std::invalid_argument(msg.str());
    }
    const long ng = cross.n_generators;
    std::vector<GridFunction> fhat(ng);
    for (long n = 0; n < ng; ++n) fhat[n] = fourier_hat(box, F[n]);

    std::vector<GridFunction> duals_hat(ng, GridFunction::Zero(box.total_points()));
    const double vol = lat.volume();
    for (long x = 0; x < lat.fiber_size(); ++x) {
        Eigen::MatrixXcd w = vol * cross.fibers[x].inverse();
        for (long k = 0; k < lat.dual_size(); ++k) {
            const long m = lat.freq_index(x, k);
            for (long n = 0; n < ng; ++n) {
                Complex s = 0;
                for (long l = 0; l < ng; ++l) s += w(n, l) * fhat[l][m];
                duals_hat[n][m] = s;
            }
        }
    }
    std::vector<GridFunction> duals(ng);
    for (long n = 0; n < ng; ++n) duals[n] = fourier_hat_inverse(box, duals_hat[n]);
    return duals;
}

AtomFamily translate_system(const Box& box, std::span<const GridFunction> generators,
                            const LatticePair& lat) {
    const int ng = static_cast<int>(generators.size());
    const int n = box.points_per_axis();
    std::vector<GridFunction> atoms;
    atoms.reserve(lat.size() * ng);
    for (long i = 0; i < lat.size(); ++i) {
        const auto shift = lat.point_shift_cells(i);
        for (int g = 0; g < ng; ++g) {
            const GridFunction& gen = generators[g];
            GridFunction a(box.total_points());
            if (box.dim() == 1) {
                for (int j = 0; j < n; ++j)
                    a[j] = gen[((j - shift[0]) % n + n) % n];
            } else {
                for (int j0 = 0; j0 < n; ++j0) {
                    const long s0 = ((j0 - shift[0]) % n + n) % n;
                    for (int j1 = 0; j1 < n; ++j1) {
                        const long s1 = ((j1 - shift[1]) % n + n) % n;
                        a[static_cast<long>(j0) * n + j1] = gen[s0 * n + s1];
                    }
                }
            }
            atoms.push_back(std::move(a));
        }
    }
    return AtomFamily(lat.nodes(ng), std::move(atoms));
}

RieszVerdict riesz_verdicts(const Box& box, std::span<const GridFunction> generators,
                            const LatticePair& lat, double relative_tol) {
    RieszVerdict v;
    FiberGram fg = fiber_gram(box, generators, generators, lat, relative_tol);
    v.max_fiber_eigenvalue = fg.sup_norm;
    v.min_fiber_eigenvalue = fg.uniformly_invertible() && fg.sup_inverse_norm > 0
                                 ? 1.0 / fg.sup_inverse_norm
                                 : 0.0;
    v.fiber_invertible = fg.uniformly_invertible();

    AtomFamily family = translate_system(box, generators, lat);
    SpectrumInfo spec = spectrum_of(gram(family).entries());
    v.gram_upper = spec.upper;
    v.gram_lower = spec.eigenvalues.empty() ? 0.0 : std::max(spec.eigenvalues.front(), 0.0);
    v.direct_positive = v.gram_lower > relative_tol * spec.upper;
    return v;
}

SisQuiltReport quilt_sis(const Box& box, std::span<const GridFunction> reference_gens,
                         const std::vector<std::vector<GridFunction>>& donor_gens,
                         const LatticePair& lat, const Covering& covering,
                         std::span<const double> radii) {
    SisQuiltReport report;
    AtomFamily reference = translate_system(box, reference_gens, lat);
    report.reference_bounds = frame_bounds(reference);
    SpanBasis span = span_basis(reference);

    std::vector<FramePair> donors;
    for (std::size_t i = 0; i < donor_gens.size(); ++i) {
        FiberGram cross = fiber_gram(box, reference_gens, donor_gens[i], lat);
        report.sup_fiber_norm = std::max(report.sup_fiber_norm, cross.sup_norm);
        report.sup_fiber_inverse_norm =
            std::max(report.sup_fiber_inverse_norm, cross.sup_inverse_norm);
        if (!cross.uniformly_invertible()) {
            std::ostringstream msg;
            msg << "donor " << i << " has a singular fiber (index "
                << cross.singular_fibers.front() << " of " << lat.fiber_size()
                << "); uniform invertibility of the fiber matrices fails";
            report.refused = true;
            report.refusal = msg.str();
            return report;
        }
        std::vector<GridFunction> duals = fiber_duals(box, reference_gens, cross, lat);
        AtomFamily synthesis = translate_system(box, duals, lat);
        AtomFamily analysis = translate_system(box, donor_gens[i], lat);
        donors.push_back(FramePair{std::move(synthesis), std::move(analysis),
                                   report.reference_bounds.lower,
                                   report.reference_bounds.upper});
    }

    PartitionOfUnity pou = build_partition(covering);
    for (double r : radii) {
        QuiltedSystem quilt = make_quilted(donors, covering, r);
        SisQuiltRow row;
        row.r = r;
        if (quilt.total_selected() > 0) {
            SpectrumInfo bounds = quilted_frame_bounds(quilt, span);
            row.lower = bounds.lower;
            row.upper = bounds.upper;
        }
        QuiltCertificate cert = certify_quilt(quilt, pou, span);
        row.deviation = cert.deviation;
        row.certified = cert.certified;
        report.rows.push_back(row);
    }
    return report;
}

// --- Kohn-Nirenberg machinery -------------------------------------------------

KNSymbol kn_symbol_rank_one(const Box& signal_box, const GridFunction& f,
                            const GridFunction& g) {
    if (signal_box.dim() != 1)
        throw std::invalid_argument("kn_symbol_rank_one: signal box must be 1-d");
    const int n = signal_box.points_per_axis();
    const double L = signal_box.side();
    if (std::abs(L * L - n) > 1e-9)
        throw std::invalid_argument("kn_symbol_rank_one: tf box needs N = L^2");
    Box tf(2, L, n);
    const GridFunction gh = fourier_hat(signal_box, g);
    GridFunction values(tf.total_points());
    for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) {
            // x w = (j h)(m / L) = j m / N exactly.
            const double phase = -2.0 * M_PI * static_cast<double>(j) * m / n;
            values[static_cast<long>(j) * n + m] =
                f[j] * std::conj(gh[m]) * Complex(std::cos(phase), std::sin(phase));
        }
    }
    return KNSymbol{tf, std::move(values), "rank-one"};
}

GridFunction tf_translate(const Box& tf_box, const GridFunction& values,
                          const Point& z) {
    const int n = tf_box.points_per_axis();
    const double h = tf_box.step();
    const long s0 = std::lround(z[0] / h);
    const long s1 = std::lround(z[1] / h);
    if (std::abs(z[0] / h - s0) > 1e-9 || std::abs(z[1] / h - s1) > 1e-9)
        throw std::invalid_argument("tf_translate: shift not commensurate with the TF grid");
    GridFunction out(values.size());
    for (int j0 = 0; j0 < n; ++j0) {
        const long src0 = ((j0 - s0) % n + n) % n;
        for (int j1 = 0; j1 < n; ++j1) {
            const long src1 = ((j1 - s1) % n + n) % n;
            out[static_cast<long>(j0) * n + j1] = values[src0 * n + src1];
        }
    }
    return out;
}

KNSymbol GaborMultiplier::symbol() const {
    if (masks.size() != pairs.size())
        throw std::invalid_argument("GaborMultiplier: one mask per generator pair");
    if (pairs.empty())
        throw std::invalid_argument("GaborMultiplier: no generator pairs");
    KNSymbol out{lattice.tf_box(), {}, "gabor-multiplier"};
    out.values = GridFunction::Zero(out.tf_box.total_points());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        KNSymbol base = kn_symbol_rank_one(signal_box, pairs[p].first, pairs[p].second);
        if (masks[p].size() != lattice.size())
            throw std::invalid_argument("GaborMultiplier: mask length mismatch");
        for (long l = 0; l < lattice.size(); ++l) {
            if (masks[p][l] == Complex(0, 0)) continue;
            out.values += masks[p][l] * tf_translate(out.tf_box, base.values, lattice.point(l));
        }
    }
    return out;
}

Eigen::MatrixXcd GaborMultiplier::operator_matrix() const {
    const long n = signal_box.total_points();
    const double h = signal_box.cell_measure();
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        for (long l = 0; l < lattice.size(); ++l) {
            if (masks[p][l] == Complex(0, 0)) continue;
            const GridFunction u = tf_atom(signal_box, lattice.point(l), pairs[p].first);
            const GridFunction v = tf_atom(signal_box, lattice.point(l), pairs[p].second);
            T.noalias() += masks[p][l] * (u * v.adjoint()) * h;
        }
    }
    return T;
}

Complex hs_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a.array() * b.array().conjugate()).sum();
}

RecoveryReport multiplier_recover(
    const GaborMultiplier& T,
    const std::vector<std::vector<std::pair<GridFunction, GridFunction>>>& probe_pairs,
    const Covering& tf_covering, double r) {
    const TFLattice& lattice = T.lattice;
    const Box tf_box = lattice.tf_box();
    if (tf_covering.box() != tf_box)
        throw std::invalid_argument("multiplier_recover: covering must live on the TF box");
    const double mu = tf_box.cell_measure();
    const long n_lat = lattice.size();
    const long n_gen = static_cast<long>(T.pairs.size());
    const long n_unknowns = n_lat * n_gen;

    // Column symbols: translated reference rank-one symbols.
    std::vector<GridFunction> base_cols(n_gen);
    for (long g = 0; g < n_gen; ++g)
        base_cols[g] =
            kn_symbol_rank_one(T.signal_box, T.pairs[g].first, T.pairs[g].second).values;

    NodeSet lattice_nodes = lattice.tf_nodes();
    RecoveryReport report;
    report.r = r;
    report.n_unknowns = n_unknowns;

    // Quilted rows: (i, lambda', n') with d(lambda', E_i) <= r.
    struct RowIndex {
        std::size_t donor;
        long lambda;
        long gen;
    };
    std::vector<RowIndex> rows;
    for (std::size_t i = 0; i < probe_pairs.size(); ++i) {
        auto sel = select_node_indices(lattice_nodes, tf_box, tf_covering.region(i), r);
        for (std::size_t k : sel)
            for (long g = 0; g < static_cast<long>(probe_pairs[i].size()); ++g)
                rows.push_back({i, static_cast<long>(k), g});
    }
    report.n_rows = static_cast<long>(rows.size());
    if (rows.empty()) {
        report.rank_deficient = true;
        return report;
    }

    std::vector<GridFunction> probe_base;
    std::vector<std::array<long, 2>> probe_base_id;  // (donor, gen) -> index
    auto probe_symbol = [&](std::size_t donor, long gen) -> const GridFunction& {
        for (std::size_t i = 0; i < probe_base_id.size(); ++i)
            if (probe_base_id[i][0] == static_cast<long>(donor) && probe_base_id[i][1] == gen)
                return probe_base[i];
        probe_base.push_back(kn_symbol_rank_one(T.signal_box, probe_pairs[donor][gen].first,
                                                probe_pairs[donor][gen].second)
                                 .values);
        probe_base_id.push_back({static_cast<long>(donor), gen});
        return probe_base.back();
    };

    const KNSymbol t_symbol = T.symbol();
    Eigen::MatrixXcd columns(tf_box.total_points(), n_unknowns);
    for (long l = 0; l < n_lat; ++l)
        for (long g = 0; g < n_gen; ++g)
            columns.col(l * n_gen + g) = tf_translate(tf_box, base_cols[g], lattice.point(l));
    Eigen::MatrixXcd S(report.n_rows, n_unknowns);
    Eigen::VectorXcd b(report.n_rows);
    for (long row = 0; row < report.n_rows; ++row) {
        const auto& ri = rows[row];
        GridFunction tau =
            tf_translate(tf_box, probe_symbol(ri.donor, ri.gen), lattice_nodes.position(ri.lambda));
        b[row] = tau.dot(t_symbol.values) * mu;
        S.row(row) = (tau.adjoint() * columns) * mu;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    report.largest_singular_value = sv.size() ? sv(0) : 0.0;
    report.smallest_singular_value =
        sv.size() >= n_unknowns ? sv(n_unknowns - 1) : 0.0;
    report.rank_deficient = report.smallest_singular_value <=
                            1e-10 * report.largest_singular_value;
    if (report.rank_deficient) return report;

    Eigen::VectorXcd m = svd.solve(b);
    std::vector<Eigen::VectorXcd> masks(n_gen, Eigen::VectorXcd::Zero(n_lat));
    for (long l = 0; l < n_lat; ++l)
        for (long g = 0; g < n_gen; ++g) masks[g][l] = m[l * n_gen + g];

    GaborMultiplier rec{T.signal_box, T.lattice, T.pairs, masks};
    const GridFunction diff = rec.symbol().values - t_symbol.values;
    const double denom = t_symbol.values.norm();
    report.hs_residual = denom > 0 ? diff.norm() / denom : diff.norm();
    report.masks = std::move(masks);
    return report;
}

}  // namespace frameforge
