#include "frameforge/amalgam.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace frameforge {

namespace {

using json = nlohmann::json;

// Circular sliding maximum of |v| over windows of `window` samples starting at
// each index (monotone deque, O(n)).
std::vector<double> sliding_max_abs(std::span<const double> v, int window) {
    const int n = static_cast<int>(v.size());
    std::vector<double> out(n);
    std::deque<int> dq;
    // Process indices over [0, n + window); window starting at x covers
    // x .. x+window-1 (mod n).
    for (int i = 0; i < n + window - 1; ++i) {
        const int idx = i % n;
        while (!dq.empty() && v[dq.back() % n] <= v[idx]) dq.pop_back();
        dq.push_back(i);
        const int start = i - window + 1;
        while (dq.front() < start) dq.pop_front();
        if (start >= 0 && start < n) out[start] = v[dq.front() % n];
    }
    return out;
}

// Local sup of |f| over the closed cube [x, x+side]^d for every grid anchor x.
std::vector<double> local_sup(const Box& box, const GridFunction& f,
                              double cube_side) {
    const int n = box.points_per_axis();
    int window = static_cast<int>(std::floor(cube_side / box.step() + 1e-9)) + 1;
    window = std::min(window, n);
    std::vector<double> mag(f.size());
    for (long i = 0; i < f.size(); ++i) mag[i] = std::abs(f[i]);
    if (box.dim() == 1) return sliding_max_abs(mag, window);

    // Separable: rows along axis 1, then columns along axis 0.
    std::vector<double> rows(mag.size());
    for (int i0 = 0; i0 < n; ++i0) {
        std::span<const double> row(mag.data() + static_cast<std::size_t>(i0) * n, n);
        auto rmax = sliding_max_abs(row, window);
        std::copy(rmax.begin(), rmax.end(), rows.begin() + static_cast<std::size_t>(i0) * n);
    }
    std::vector<double> out(mag.size());
    std::vector<double> col(n), cmax;
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i0 = 0; i0 < n; ++i0) col[i0] = rows[static_cast<std::size_t>(i0) * n + i1];
        cmax = sliding_max_abs(col, window);
        for (int i0 = 0; i0 < n; ++i0) out[static_cast<std::size_t>(i0) * n + i1] = cmax[i0];
    }
    return out;
}

void validate_cube_side(const Box& box, double cube_side) {
    if (!(cube_side >= box.step() - 1e-12) || !(cube_side <= box.side() / 4 + 1e-12))
        throw std::invalid_argument("family_amalgam_norm: cube_side must lie in [h, L/4]");
}

}  // namespace

// --- AtomFamily ---------------------------------------------------------

AtomFamily::AtomFamily(NodeSet nodes, std::vector<GridFunction> atoms,
                       std::optional<Envelope> envelope)
    : nodes_(std::move(nodes)), atoms_(std::move(atoms)), envelope_(envelope) {
    if (atoms_.size() != nodes_.size())
        throw std::invalid_argument("AtomFamily: atoms/nodes length mismatch");
    const Box& box = nodes_.box();
    const long total = box.total_points();
    for (const auto& a : atoms_)
        if (static_cast<long>(a.size()) != total)
            throw std::invalid_argument("AtomFamily: atom grid size mismatch");

    if (envelope_) {
        double worst_excess = 0;
        std::size_t worst_k = 0;
        long worst_x = 0;
        for (std::size_t k = 0; k < atoms_.size(); ++k) {
            const Point node = nodes_.position(k);
            for (long x = 0; x < total; ++x) {
                const double bound =
                    envelope_->constant *
                    std::pow(1.0 + box.dist(box.point(x), node), -envelope_->exponent);
                const double excess = std::abs(atoms_[k][x]) - bound;
                if (excess > worst_excess) {
                    worst_excess = excess;
                    worst_k = k;
                    worst_x = x;
                }
            }
        }
        if (worst_excess > 1e-12 * envelope_->constant) {
            std::ostringstream msg;
            msg << "AtomFamily: envelope violated at atom " << worst_k
                << ", grid point " << worst_x << " (|f|="
                << std::abs(atoms_[worst_k][worst_x]) << ", excess=" << worst_excess
                << ")";
            throw std::invalid_argument(msg.str());
        }
    }

    matrix_.resize(box.total_points(), static_cast<long>(atoms_.size()));
    for (std::size_t k = 0; k < atoms_.size(); ++k) matrix_.col(k) = atoms_[k];
}

AtomFamily AtomFamily::subset(std::span<const std::size_t> indices) const {
    std::vector<GridFunction> atoms;
    atoms.reserve(indices.size());
    for (std::size_t i : indices) atoms.push_back(atoms_[i]);
    return AtomFamily(nodes_.subset(indices), std::move(atoms), envelope_);
}

AtomFamily AtomFamily::scaled(Complex factor) const {
    std::vector<GridFunction> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) atoms.push_back(a * factor);
    std::optional<Envelope> env = envelope_;
    if (env) env->constant *= std::abs(factor);
    return AtomFamily(nodes_, std::move(atoms), env);
}

// --- amalgam norm --------------------------------------------------------

FamilyAmalgamNorm family_amalgam_norm(const AtomFamily& family, const Weight& w,
                                      double cube_side) {
    const Box& box = family.box();
    validate_cube_side(box, cube_side);
    FamilyAmalgamNorm out;
    out.window_cube_side = cube_side;
    const long total = box.total_points();
    std::vector<double> sum_over_nodes(total, 0.0);
    out.per_node_l1.resize(family.size(), 0.0);

    for (std::size_t k = 0; k < family.size(); ++k) {
        auto sup = local_sup(box, family.atom(k), cube_side);
        const Point node = family.nodes().position(k);
        double l1 = 0;
        for (long x = 0; x < total; ++x) {
            const double g = sup[x] * w.at_dist(box.dist(box.point(x), node));
            l1 += g;
            sum_over_nodes[x] += g;
        }
        out.per_node_l1[k] = l1 * box.cell_measure();
    }
    double max_l1 = 0;
    for (double v : out.per_node_l1) max_l1 = std::max(max_l1, v);
    out.sup_sum = sum_over_nodes.empty()
                      ? 0.0
                      : *std::max_element(sum_over_nodes.begin(), sum_over_nodes.end());
    out.value = std::max(max_l1, out.sup_sum);
    return out;
}

// --- SchurMatrix ----------------------------------------------------------

SchurMatrix::SchurMatrix(Eigen::MatrixXcd entries, NodeSet rows, NodeSet cols)
    : entries_(std::move(entries)), rows_(std::move(rows)), cols_(std::move(cols)) {
    if (entries_.rows() != static_cast<long>(rows_.size()) ||
        entries_.cols() != static_cast<long>(cols_.size()))
        throw std::invalid_argument("SchurMatrix: entry/node shape mismatch");
    if (rows_.box() != cols_.box())
        throw std::invalid_argument("SchurMatrix: row/column boxes differ");
}

double SchurMatrix::schur_norm(const Weight& w) const {
    const Box& box = rows_.box();
    const long m = entries_.rows();
    const long n = entries_.cols();
    Eigen::MatrixXd weighted(m, n);
    for (long k = 0; k < m; ++k) {
        const Point rk = rows_.position(k);
        for (long j = 0; j < n; ++j)
            weighted(k, j) =
                std::abs(entries_(k, j)) * w.at_dist(box.dist(rk, cols_.position(j)));
    }
    const double row_sup = m > 0 ? weighted.rowwise().sum().maxCoeff() : 0.0;
    const double col_sup = n > 0 ? weighted.colwise().sum().maxCoeff() : 0.0;
    return std::max(row_sup, col_sup);
}

std::string SchurMatrix::to_json() const {
    json j;
    j["rows"] = json::parse(node_set_to_json(rows_));
    j["cols"] = json::parse(node_set_to_json(cols_));
    json data = json::array();
    for (long k = 0; k < entries_.rows(); ++k) {
        json row = json::array();
        for (long c = 0; c < entries_.cols(); ++c)
            row.push_back({entries_(k, c).real(), entries_(k, c).imag()});
        data.push_back(row);
    }
    j["entries"] = data;
    return j.dump();
}

// --- multiplier operations -------------------------------------------------

GridFunction synthesize(std::span<const Complex> c, const AtomFamily& family) {
    if (c.size() != family.size())
        throw std::invalid_argument("synthesize: coefficient/atom length mismatch");
    Eigen::VectorXcd cv(static_cast<long>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) cv[static_cast<long>(i)] = c[i];
    if (family.size() == 0)
        return GridFunction::Zero(family.box().total_points());
    return family.matrix() * cv;
}

SynthesisReport synthesize_checked(std::span<const Complex> c,
                                   const AtomFamily& family, double p,
                                   const ModeratedPair& vw, double cube_side) {
    SynthesisReport rep;
    rep.result = synthesize(c, family);
    // Left side: amalgam W(B, L^p_v) norm of the synthesized function, realized
    // as the L^p_v norm of its local sup control function.
    const Box& box = family.box();
    validate_cube_side(box, cube_side);
    auto sup = local_sup(box, rep.result, cube_side);
    GridFunction control(box.total_points());
    for (long i = 0; i < box.total_points(); ++i) control[i] = sup[i];
    rep.lhs = lp_norm(box, control, p, vw.v);
    const double cnorm = weighted_seq_norm(c, family.nodes(), p, vw.v);
    const double fam = family_amalgam_norm(family, vw.w, cube_side).value;
    rep.rhs = vw.constant * cnorm * fam;
    rep.ratio = cnorm * fam > 0 ? rep.lhs / (cnorm * fam) : 0.0;
    return rep;
}

AtomFamily matrix_apply(const SchurMatrix& C, const AtomFamily& family) {
    if (C.cols().size() != family.size() || C.cols().box() != family.box())
        throw std::invalid_argument("matrix_apply: column index set must match family nodes");
    Eigen::MatrixXcd atoms = family.matrix() * C.entries().transpose();
    std::vector<GridFunction> out;
    out.reserve(C.rows().size());
    for (long k = 0; k < atoms.cols(); ++k) out.push_back(atoms.col(k));
    return AtomFamily(C.rows(), std::move(out));
}

MatrixApplyReport matrix_apply_checked(const SchurMatrix& C,
                                       const AtomFamily& family, const Weight& w,
                                       double cube_side) {
    AtomFamily result = matrix_apply(C, family);
    const double lhs = family_amalgam_norm(result, w, cube_side).value;
    const double rhs =
        C.schur_norm(w) * family_amalgam_norm(family, w, cube_side).value;
    return MatrixApplyReport{std::move(result), lhs, rhs};
}

SchurMatrix cross_correlation(const AtomFamily& F, const AtomFamily& G) {
    if (F.box() != G.box())
        throw std::invalid_argument("cross_correlation: families on different boxes");
    Eigen::MatrixXcd entries =
        (G.matrix().adjoint() * F.matrix()).transpose() * F.box().cell_measure();
    return SchurMatrix(std::move(entries), F.nodes(), G.nodes());
}

CrossCorrelationReport cross_correlation_checked(const AtomFamily& F,
                                                 const AtomFamily& G,
                                                 const Weight& w,
                                                 double cube_side) {
    SchurMatrix C = cross_correlation(F, G);
    CrossCorrelationReport rep;
    rep.schur_norm = C.schur_norm(w);
    rep.product_of_family_norms = family_amalgam_norm(F, w, cube_side).value *
                                  family_amalgam_norm(G, w, cube_side).value;
    rep.ratio = rep.product_of_family_norms > 0
                    ? rep.schur_norm / rep.product_of_family_norms
                    : 0.0;
    return rep;
}

std::vector<Complex> analyze(const GridFunction& f, const AtomFamily& family) {
    std::vector<Complex> c(family.size());
    if (family.size() == 0) return c;
    Eigen::VectorXcd coeffs =
        family.matrix().adjoint() * f * family.box().cell_measure();
    for (std::size_t k = 0; k < family.size(); ++k) c[k] = coeffs[static_cast<long>(k)];
    return c;
}

AnalysisReport analyze_checked(const GridFunction& f, const AtomFamily& family,
                               double p, const ModeratedPair& vw,
                               double cube_side) {
    AnalysisReport rep;
    rep.coefficients = analyze(f, family);
    rep.lhs = weighted_seq_norm(rep.coefficients, family.nodes(), p, vw.v);
    const double fnorm = lp_norm(family.box(), f, p, vw.v);
    const double fam = family_amalgam_norm(family, vw.w, cube_side).value;
    rep.rhs = fnorm * fam;
    rep.ratio = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

// --- Schur interpolation lemma oracle ---------------------------------------

namespace {

double plain_lp(const Box& box, const GridFunction& f, double p) {
    return lp_norm(box, f, p, Weight(0.0));
}

double seq_lp(std::span<const Complex> c, double p) {
    if (std::isinf(p)) {
        double m = 0;
        for (auto z : c) m = std::max(m, std::abs(z));
        return m;
    }
    double s = 0;
    for (auto z : c) s += std::pow(std::abs(z), p);
    return std::pow(s, 1.0 / p);
}

}  // namespace

bool SchurLemmaReport::all_hold() const {
    for (const auto& r : part_a)
        if (!r.holds) return false;
    for (const auto& r : part_b)
        if (!r.holds) return false;
    return true;
}

SchurLemmaReport schur_interpolation_check(const AtomFamily& family,
                                           std::span<const Complex> c,
                                           const GridFunction& g) {
    const Box& box = family.box();
    const long total = box.total_points();

    double sup_l1 = 0;
    GridFunction abs_sum = GridFunction::Zero(total);
    for (std::size_t k = 0; k < family.size(); ++k) {
        sup_l1 = std::max(sup_l1, plain_lp(box, family.atom(k), 1.0));
        for (long i = 0; i < total; ++i) abs_sum[i] += std::abs(family.atom(k)[i]);
    }
    const double sup_sum = total > 0 ? abs_sum.real().maxCoeff() : 0.0;

    SchurLemmaReport rep;
    const double ps[3] = {1.0, 2.0, kInf};
    const GridFunction cf = synthesize(c, family);
    auto conj_dual = [](double p) {
        if (p == 1.0) return 0.0;  // 1/p' = 0 convention
        if (std::isinf(p)) return 1.0;
        return 1.0 - 1.0 / p;
    };
    for (double p : ps) {
        const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
        const double inv_q = conj_dual(p);
        double lhs = plain_lp(box, cf, p);
        double rhs = seq_lp(c, p) * std::pow(sup_l1, inv_p) * std::pow(sup_sum, inv_q);
        rep.part_a.push_back({p, lhs, rhs, lhs <= rhs * (1 + 1e-9) + 1e-12});
    }
    // part (b): (g . F)_k = int g f_k
    std::vector<Complex> gf(family.size());
    for (std::size_t k = 0; k < family.size(); ++k) {
        Complex s = 0;
        for (long i = 0; i < total; ++i) s += g[i] * family.atom(k)[i];
        gf[k] = s * box.cell_measure();
    }
    for (double p : ps) {
        const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
        const double inv_q = conj_dual(p);
        double lhs = seq_lp(gf, p);
        double rhs = plain_lp(box, g, p) * std::pow(sup_l1, inv_q) * std::pow(sup_sum, inv_p);
        rep.part_b.push_back({p, lhs, rhs, lhs <= rhs * (1 + 1e-9) + 1e-12});
    }
    return rep;
}

// --- serialization -----------------------------------------------------

std::string atom_family_to_json(const AtomFamily& family) {
    json j;
    j["nodes"] = json::parse(node_set_to_json(family.nodes()));
    json atoms = json::array();
    for (std::size_t k = 0; k < family.size(); ++k) {
        json a = json::array();
        const auto& f = family.atom(k);
        for (long i = 0; i < f.size(); ++i) a.push_back({f[i].real(), f[i].imag()});
        atoms.push_back(a);
    }
    j["atoms"] = atoms;
    if (family.envelope())
        j["envelope"] = {{"C", family.envelope()->constant},
                         {"exponent", family.envelope()->exponent}};
    return j.dump();
}

AtomFamily atom_family_from_json(const std::string& text) {
    json j = json::parse(text);
    NodeSet nodes = node_set_from_json(j.at("nodes").dump());
    std::vector<GridFunction> atoms;
    for (const auto& a : j.at("atoms")) {
        GridFunction f(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            f[static_cast<long>(i)] = Complex(a[i][0].get<double>(), a[i][1].get<double>());
        atoms.push_back(std::move(f));
    }
    std::optional<Envelope> env;
    if (j.contains("envelope"))
        env = Envelope{j["envelope"].at("C").get<double>(),
                       j["envelope"].at("exponent").get<double>()};
    return AtomFamily(std::move(nodes), std::move(atoms), env);
}

}  // namespace frameforge
