#include "frameforge/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "frameforge/gabor.hpp"
#include "frameforge/sampling.hpp"
#include "frameforge/siskn.hpp"
#include "frameforge/surgery.hpp"

namespace frameforge {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

// Thrown for malformed configs; maps to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a certification precondition fails; maps to exit code 2.
struct Refusal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int thread_count() {
    const char* env = std::getenv("FRAME_FORGE_THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

// Deterministic parallel map: cell i writes slot i, any thread count.
void parallel_for(long n, const std::function<void(long)>& body) {
    const int threads = std::min<long>(thread_count(), n);
    if (threads <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t]() {
            for (long i = t; i < n; i += threads) body(i);
        });
    for (auto& th : pool) th.join();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt(long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "1" : "0"; }

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(std::vector<std::string> cells) {
        if (cells.size() != header_.size())
            throw std::logic_error("CsvWriter: column count mismatch");
        rows_.push_back(std::move(cells));
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot open output file: " + path);
        for (std::size_t i = 0; i < header_.size(); ++i)
            out << header_[i] << (i + 1 < header_.size() ? "," : "\n");
        for (const auto& r : rows_)
            for (std::size_t i = 0; i < r.size(); ++i)
                out << r[i] << (i + 1 < r.size() ? "," : "\n");
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

const json& need(const json& j, const char* field) {
    if (!j.contains(field))
        throw ConfigError(std::string("missing config field \"") + field + "\"");
    return j.at(field);
}

double parse_p(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInf;
        throw ConfigError("p entries must be numbers or \"inf\"");
    }
    return j.get<double>();
}

Box parse_domain(const json& cfg) {
    const json& d = need(cfg, "domain");
    return Box(need(d, "dim").get<int>(), need(d, "side").get<double>(),
               need(d, "points_per_axis").get<int>());
}

std::vector<double> parse_radii(const json& cfg) {
    std::vector<double> radii = need(cfg, "radii").get<std::vector<double>>();
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw ConfigError("field \"radii\" must be strictly increasing");
    if (radii.empty()) throw ConfigError("field \"radii\" must be nonempty");
    return radii;
}

// --- atom/generator builders -------------------------------------------------

GridFunction profile_atom(const Box& box, const Point& node, const std::string& kind,
                          double width, double exponent) {
    const long total = box.total_points();
    GridFunction f(total);
    for (long i = 0; i < total; ++i) {
        const double d = box.dist(box.point(i), node);
        double value = 0;
        if (kind == "gaussian-bumps") {
            value = std::exp(-0.5 * (d / width) * (d / width));
        } else if (kind == "bspline-like") {
            const double u = d / width;
            if (u < 1.0)
                value = (4.0 - 6.0 * u * u + 3.0 * u * u * u) / 6.0;
            else if (u < 2.0)
                value = (2.0 - u) * (2.0 - u) * (2.0 - u) / 6.0;
        } else if (kind == "polynomial-bumps") {
            value = std::pow(1.0 + d, -exponent);
        } else {
            throw ConfigError("unknown atom kind \"" + kind + "\"");
        }
        f[i] = value;
    }
    return f;
}

NodeSet spaced_nodes(const Box& box, double spacing, double offset) {
    std::vector<Point> pos;
    const int per_axis = static_cast<int>(std::lround(box.side() / spacing));
    if (per_axis < 1 || std::abs(per_axis * spacing - box.side()) > 1e-9)
        throw ConfigError("node spacing must divide the box side");
    if (box.dim() == 1) {
        for (int i = 0; i < per_axis; ++i) pos.push_back({box.wrap(offset + i * spacing), 0});
    } else {
        for (int i = 0; i < per_axis; ++i)
            for (int j = 0; j < per_axis; ++j)
                pos.push_back({box.wrap(offset + i * spacing), box.wrap(offset + j * spacing)});
    }
    return NodeSet(box, pos);
}

AtomFamily build_family(const Box& box, const json& spec) {
    const std::string kind = need(spec, "kind").get<std::string>();
    if (kind == "custom-file") {
        const std::string file = need(spec, "file").get<std::string>();
        std::ifstream in(file);
        if (!in) throw ConfigError("atom file does not exist: " + file);
        std::stringstream ss;
        ss << in.rdbuf();
        return atom_family_from_json(ss.str());
    }
    const double spacing = need(spec, "spacing").get<double>();
    const double offset = spec.value("offset", 0.0);
    const double width = spec.value("width", 1.0);
    double profile_exp = 0;
    if (kind == "polynomial-bumps")
        profile_exp = need(spec, "profile_exponent").get<double>();
    NodeSet nodes = spaced_nodes(box, spacing, offset);
    std::vector<GridFunction> atoms;
    atoms.reserve(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k)
        atoms.push_back(profile_atom(box, nodes.position(k), kind, width, profile_exp));
    std::optional<Envelope> env;
    if (spec.contains("envelope"))
        env = Envelope{need(spec.at("envelope"), "C").get<double>(),
                       need(spec.at("envelope"), "exponent").get<double>()};
    return AtomFamily(std::move(nodes), std::move(atoms), env);
}

Covering build_covering(const Box& box, const json& spec) {
    const std::string kind = need(spec, "kind").get<std::string>();
    if (kind == "axis-split") {
        std::vector<std::pair<double, double>> intervals;
        for (const auto& iv : need(spec, "intervals"))
            intervals.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
        return axis_split_covering(box, intervals);
    }
    throw ConfigError("unknown covering kind \"" + kind + "\"");
}

Eigen::MatrixXcd random_span_elements(const AtomFamily& family, int count, Rng& rng) {
    Eigen::MatrixXcd out(family.box().total_points(), count);
    for (int c = 0; c < count; ++c) {
        Eigen::VectorXcd coeff(static_cast<long>(family.size()));
        for (long k = 0; k < coeff.size(); ++k) coeff[k] = rng.normal_complex();
        out.col(c) = family.matrix() * coeff;
    }
    return out;
}

void write_manifest(const std::string& path, const json& config,
                    const ordered_json& fitted) {
    ordered_json m;
    m["library_version"] = kVersion;
    m["config"] = config;
    m["fitted"] = fitted;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << m.dump(2) << "\n";
}

std::string output_prefix(const json& cfg) {
    const std::string prefix = need(cfg, "output").get<std::string>();
    std::filesystem::path p(prefix);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return prefix;
}

// --- experiment kinds --------------------------------------------------------

ExperimentOutcome run_surgery_sweep(const json& cfg) {
    const Box box = parse_domain(cfg);
    Rng rng(need(cfg, "seed").get<std::uint64_t>());
    AtomFamily reference = build_family(box, need(cfg, "atoms"));
    FramePair space = canonical_dual(reference);
    SpanBasis span = span_basis(reference);

    std::vector<FramePair> donors;
    for (const auto& dspec : need(cfg, "donors"))
        donors.push_back(exterior_dual(build_family(box, dspec), span));

    Covering covering = build_covering(box, need(cfg, "covering"));
    if (donors.size() != covering.size())
        throw ConfigError("donor count must equal covering region count");
    PartitionOfUnity pou = build_partition(covering);
    const std::vector<double> radii = parse_radii(cfg);
    const int n_test = need(cfg, "test_functions").value("count", 20);
    Eigen::MatrixXcd tests = random_span_elements(reference, n_test, rng);

    std::vector<double> ps;
    for (const auto& pj : need(cfg, "p_grid")) ps.push_back(parse_p(pj));
    std::vector<double> wexps = need(cfg, "weight_exponents").get<std::vector<double>>();

    // Radius-indexed quilted bounds (L^2 certification, p-independent).
    std::vector<SpectrumInfo> bounds(radii.size());
    parallel_for(static_cast<long>(radii.size()), [&](long i) {
        QuiltedSystem q = make_quilted(donors, covering, radii[i]);
        if (q.total_selected() > 0) bounds[i] = quilted_frame_bounds(q, span);
    });

    CsvWriter csv({"r", "p", "weight_exponent", "worst_rel_error", "fitted_slope",
                   "lower_bound", "upper_bound", "overlap_count"});
    ordered_json fitted;
    for (double p : ps) {
        for (double wexp : wexps) {
            SweepResult sweep =
                error_sweep(donors, covering, pou, radii, tests, p, Weight(wexp));
            for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
                const auto& row = sweep.rows[i];
                csv.row({fmt(row.r), std::isinf(p) ? "inf" : fmt(p), fmt(wexp),
                         fmt(row.worst_rel_error), fmt(sweep.fitted_slope),
                         fmt(bounds[i].lower), fmt(bounds[i].upper),
                         fmt(covering.overlap_count())});
            }
            std::string key = (std::isinf(p) ? std::string("inf") : fmt(p)) + "/" + fmt(wexp);
            fitted["slope"][key] = sweep.fitted_slope;
            fitted["monotone"][key] = sweep.monotone;
        }
    }
    fitted["reference_lower"] = space.lower;
    fitted["reference_upper"] = space.upper;
    fitted["local_finiteness"] = covering.local_finiteness();

    ExperimentOutcome outcome;
    const std::string prefix = output_prefix(cfg);
    csv.write(prefix + ".csv");
    write_manifest(prefix + ".manifest.json", cfg, fitted);
    outcome.files_written = {prefix + ".csv", prefix + ".manifest.json"};
    outcome.message = "surgery sweep complete";
    return outcome;
}

ExperimentOutcome run_gabor_quilt(const json& cfg) {
    const Box box = parse_domain(cfg);
    const GridFunction window = gauss_window(box);
    std::vector<GaborMolecules> donors;
    for (const auto& dspec : need(cfg, "donors")) {
        TFLattice lattice(box, need(dspec, "time_step").get<double>(),
                          need(dspec, "freq_step").get<double>(),
                          dspec.value("time_offset", 0.0), dspec.value("freq_offset", 0.0));
        donors.push_back(gabor_system(lattice, window));
    }
    const json& ej = need(cfg, "envelope");
    Envelope env{need(ej, "C").get<double>(), need(ej, "exponent").get<double>()};
    GaborQuiltSetup setup = prepare_gabor_quilt(box, std::move(donors), env);
    Covering covering = build_covering(setup.tf_box, need(cfg, "covering"));
    PartitionOfUnity pou = build_partition(covering);
    const std::vector<double> radii = parse_radii(cfg);

    std::vector<GaborQuiltResult> results;
    for (double r : radii) results.push_back(quilt_gabor(setup, covering, pou, r));

    CsvWriter csv({"r", "lower_bound", "upper_bound", "rank", "deviation", "certified",
                   "signal_lower", "signal_upper"});
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const auto& res = results[i];
        csv.row({fmt(radii[i]), fmt(res.tf_bounds.lower), fmt(res.tf_bounds.upper),
                 fmt(res.tf_bounds.rank), fmt(res.certificate.deviation),
                 fmt(res.certificate.certified), fmt(res.signal_bounds.lower),
                 fmt(res.signal_bounds.upper)});
    }
    ordered_json fitted;
    for (std::size_t i = 0; i < setup.donor_signal_bounds.size(); ++i) {
        fitted["donor_lower"].push_back(setup.donor_signal_bounds[i].lower);
        fitted["donor_upper"].push_back(setup.donor_signal_bounds[i].upper);
    }

    ExperimentOutcome outcome;
    const std::string prefix = output_prefix(cfg);
    csv.write(prefix + ".csv");
    write_manifest(prefix + ".manifest.json", cfg, fitted);
    outcome.files_written = {prefix + ".csv", prefix + ".manifest.json"};
    bool any_certified = false;
    for (const auto& res : results) any_certified |= res.certificate.certified;
    if (!any_certified) {
        outcome.exit_code = 2;
        outcome.message = "no radius certified the quilted Gabor system";
    } else {
        outcome.message = "gabor quilt complete";
    }
    return outcome;
}

std::vector<GridFunction> build_generators(const Box& box, const json& list) {
    std::vector<GridFunction> gens;
    for (const auto& gspec : list) {
        const std::string kind = need(gspec, "kind").get<std::string>();
        gens.push_back(profile_atom(box, {gspec.value("center", 0.0), 0.0}, kind,
                                    gspec.value("width", 1.0),
                                    gspec.value("profile_exponent", 0.0)));
    }
    return gens;
}

ExperimentOutcome run_sis_quilt(const json& cfg) {
    const Box box = parse_domain(cfg);
    LatticePair lat(box, need(need(cfg, "lattice"), "steps").get<std::vector<double>>());
    std::vector<GridFunction> ref = build_generators(box, need(cfg, "reference_generators"));
    std::vector<std::vector<GridFunction>> donors;
    for (const auto& dj : need(cfg, "donors")) donors.push_back(build_generators(box, dj));
    Covering covering = build_covering(box, need(cfg, "covering"));
    const std::vector<double> radii = parse_radii(cfg);

    SisQuiltReport report = quilt_sis(box, ref, donors, lat, covering, radii);
    if (report.refused) throw Refusal(report.refusal);

    CsvWriter csv({"r", "lower_bound", "upper_bound", "deviation", "certified"});
    for (const auto& row : report.rows)
        csv.row({fmt(row.r), fmt(row.lower), fmt(row.upper), fmt(row.deviation),
                 fmt(row.certified)});
    ordered_json fitted;
    fitted["sup_fiber_norm"] = report.sup_fiber_norm;
    fitted["sup_fiber_inverse_norm"] = report.sup_fiber_inverse_norm;
    fitted["reference_lower"] = report.reference_bounds.lower;
    fitted["reference_upper"] = report.reference_bounds.upper;

    ExperimentOutcome outcome;
    const std::string prefix = output_prefix(cfg);
    csv.write(prefix + ".csv");
    write_manifest(prefix + ".manifest.json", cfg, fitted);
    outcome.files_written = {prefix + ".csv", prefix + ".manifest.json"};
    outcome.message = "sis quilt complete";
    return outcome;
}

ExperimentOutcome run_sampling(const json& cfg) {
    const Box box = parse_domain(cfg);
    Rng rng(need(cfg, "seed").get<std::uint64_t>());
    AtomFamily reference = build_family(box, need(cfg, "atoms"));
    FramePair space = canonical_dual(reference);

    std::vector<NodeSet> donor_sets;
    for (const auto& dj : need(cfg, "donors"))
        donor_sets.push_back(spaced_nodes(box, need(dj, "spacing").get<double>(),
                                          dj.value("offset", 0.0)));
    Covering covering = build_covering(box, need(cfg, "covering"));
    const std::vector<double> radii = parse_radii(cfg);
    const double p = parse_p(need(cfg, "p"));
    const Weight v(need(cfg, "weight_exponent").get<double>());
    const int n_test = need(cfg, "test_functions").value("count", 20);
    Eigen::MatrixXcd tests = random_span_elements(reference, n_test, rng);

    SamplingResult result =
        quilt_sampling(space, donor_sets, covering, radii, p, v, tests);

    CsvWriter csv({"r", "A_r", "B_r", "recon_rel_error", "n_points"});
    for (const auto& row : result.rows)
        csv.row({fmt(row.r), fmt(row.lower), fmt(row.upper), fmt(row.recon_rel_error),
                 fmt(row.n_points)});
    ordered_json fitted;
    for (const auto& b : result.donor_bounds) {
        fitted["donor_lower"].push_back(b.lower);
        fitted["donor_upper"].push_back(b.upper);
    }

    ExperimentOutcome outcome;
    const std::string prefix = output_prefix(cfg);
    csv.write(prefix + ".csv");
    write_manifest(prefix + ".manifest.json", cfg, fitted);
    outcome.files_written = {prefix + ".csv", prefix + ".manifest.json"};
    outcome.message = "sampling experiment complete";
    return outcome;
}

ExperimentOutcome run_multiplier(const json& cfg) {
    const Box box = parse_domain(cfg);
    Rng rng(need(cfg, "seed").get<std::uint64_t>());
    const json& lj = need(cfg, "lattice");
    TFLattice lattice(box, need(lj, "time_step").get<double>(),
                      need(lj, "freq_step").get<double>());

    auto build_pairs = [&](const json& list) {
        std::vector<std::pair<GridFunction, GridFunction>> pairs;
        for (const auto& pj : list) {
            GridFunction f = profile_atom(box, {pj.value("center", 0.0), 0.0},
                                          need(pj, "kind").get<std::string>(),
                                          pj.value("width", 1.0),
                                          pj.value("profile_exponent", 0.0));
            pairs.emplace_back(f, f);
        }
        return pairs;
    };
    GaborMultiplier truth{box, lattice, build_pairs(need(cfg, "reference_pairs")), {}};
    for (std::size_t p = 0; p < truth.pairs.size(); ++p) {
        Eigen::VectorXcd mask(lattice.size());
        for (long l = 0; l < lattice.size(); ++l) mask[l] = rng.normal_complex();
        truth.masks.push_back(mask);
    }

    std::vector<std::vector<std::pair<GridFunction, GridFunction>>> probes;
    for (const auto& dj : need(cfg, "probes")) probes.push_back(build_pairs(dj));
    Covering covering = build_covering(lattice.tf_box(), need(cfg, "covering"));
    const std::vector<double> radii = parse_radii(cfg);

    CsvWriter csv({"r", "n_probes", "smallest_singular_value", "mask_rel_error",
                   "hs_residual"});
    ordered_json fitted;
    bool last_ok = false;
    for (double r : radii) {
        RecoveryReport rep = multiplier_recover(truth, probes, covering, r);
        double mask_err = kInf;
        if (rep.masks) {
            double num = 0, den = 0;
            for (std::size_t p = 0; p < truth.masks.size(); ++p) {
                num += ((*rep.masks)[p] - truth.masks[p]).squaredNorm();
                den += truth.masks[p].squaredNorm();
            }
            mask_err = std::sqrt(num / den);
        }
        csv.row({fmt(r), fmt(rep.n_rows), fmt(rep.smallest_singular_value),
                 rep.masks ? fmt(mask_err) : "nan", rep.masks ? fmt(rep.hs_residual) : "nan"});
        last_ok = !rep.rank_deficient;
    }

    ExperimentOutcome outcome;
    const std::string prefix = output_prefix(cfg);
    csv.write(prefix + ".csv");
    write_manifest(prefix + ".manifest.json", cfg, fitted);
    outcome.files_written = {prefix + ".csv", prefix + ".manifest.json"};
    if (!last_ok) {
        outcome.exit_code = 2;
        outcome.message = "mask recovery rank-deficient at the largest radius";
    } else {
        outcome.message = "multiplier recovery complete";
    }
    return outcome;
}

}  // namespace

std::string library_version() { return kVersion; }

ExperimentOutcome run_selftest() {
    ExperimentOutcome outcome;
    try {
        Box box(1, 16.0, 256);
        NodeSet integers = spaced_nodes(box, 1.0, 0.0);
        if (rel_separation(integers) != 2)
            throw std::runtime_error("selftest: rel_separation(integers) != 2");
        if (rel_separation(integers.translated({3.0, 0})) != 2)
            throw std::runtime_error("selftest: rel_separation not translation invariant");
        if (!is_L_dense(integers, 0.6) || is_L_dense(integers, 0.4))
            throw std::runtime_error("selftest: L-density thresholds wrong");

        auto intervals = std::vector<std::pair<double, double>>{{0.0, 9.0}, {8.0, 16.0}};
        Covering cov = axis_split_covering(box, intervals);
        PartitionOfUnity pou = build_partition(cov);
        for (long x = 0; x < box.total_points(); ++x) {
            double s = 0;
            for (std::size_t i = 0; i < pou.size(); ++i) s += pou.weight(i)[x];
            if (std::abs(s - 1.0) > 1e-12)
                throw std::runtime_error("selftest: partition of unity does not sum to 1");
        }

        AtomFamily bumps = [&] {
            NodeSet nodes = spaced_nodes(box, 1.0, 0.0);
            std::vector<GridFunction> atoms;
            for (std::size_t k = 0; k < nodes.size(); ++k)
                atoms.push_back(profile_atom(box, nodes.position(k), "gaussian-bumps", 0.6, 0));
            return AtomFamily(nodes, atoms);
        }();
        FramePair pair = canonical_dual(bumps);
        Rng rng(7);
        Eigen::MatrixXcd tests = random_span_elements(bumps, 5, rng);
        for (long c = 0; c < tests.cols(); ++c) {
            GridFunction f = tests.col(c);
            GridFunction rec = pair.atoms.matrix() *
                               (pair.duals.matrix().adjoint() * f * box.cell_measure());
            if (l2_norm(box, rec - f) > 1e-8 * l2_norm(box, f))
                throw std::runtime_error("selftest: dual-frame reconstruction failed");
        }

        Eigen::MatrixXcd g = gram(bumps).entries();
        Eigen::MatrixXcd pinv = pseudo_inverse_svd(g, 1e-10 * g.norm());
        if ((g * pinv * g - g).norm() > 1e-8 * g.norm())
            throw std::runtime_error("selftest: Penrose identity failed");

        Box sbox(1, 8.0, 64);
        GridFunction win = gauss_window(sbox);
        Rng rng2(11);
        GridFunction f(64);
        for (long i = 0; i < 64; ++i) f[i] = rng2.normal_complex();
        STFTImage img = stft(sbox, f, win);
        const double tf_norm = img.values.norm() * std::sqrt(img.tf_box.cell_measure());
        if (std::abs(tf_norm - l2_norm(sbox, f)) > 1e-6 * l2_norm(sbox, f))
            throw std::runtime_error("selftest: STFT isometry failed");

        outcome.message = "selftest passed";
    } catch (const std::exception& e) {
        outcome.exit_code = 1;
        outcome.message = e.what();
    }
    return outcome;
}

ExperimentOutcome run_experiment(const std::string& config_path) {
    ExperimentOutcome outcome;
    try {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("config file does not exist: " + config_path);
        json cfg = json::parse(in);
        const std::string kind = need(cfg, "kind").get<std::string>();
        if (kind != "selftest") need(cfg, "seed");

        if (kind == "selftest") return run_selftest();
        if (kind == "surgery-sweep") return run_surgery_sweep(cfg);
        if (kind == "gabor-quilt") return run_gabor_quilt(cfg);
        if (kind == "sis-quilt") return run_sis_quilt(cfg);
        if (kind == "sampling") return run_sampling(cfg);
        if (kind == "multiplier") return run_multiplier(cfg);
        throw ConfigError("unknown experiment kind \"" + kind + "\"");
    } catch (const Refusal& e) {
        outcome.exit_code = 2;
        outcome.message = std::string("certification refused: ") + e.what();
    } catch (const std::exception& e) {
        outcome.exit_code = 1;
        outcome.message = e.what();
    }
    return outcome;
}

std::string config_schema() {
    return R"(frame-forge experiment config (JSON, one experiment per file)

Common fields:
  kind     : "surgery-sweep" | "gabor-quilt" | "sis-quilt" | "sampling"
             | "multiplier" | "selftest"
  domain   : {"dim": 1|2, "side": L, "points_per_axis": N}
  seed     : integer; all random draws flow from it
  output   : path prefix; writes <output>.csv and <output>.manifest.json

Atom/generator specs:
  {"kind": "gaussian-bumps" | "bspline-like" | "polynomial-bumps" | "custom-file",
   "spacing": a, "offset": o, "width": w,
   "profile_exponent": e,          (polynomial-bumps only)
   "envelope": {"C": c, "exponent": s},   (optional; verified on construction)
   "file": path}                   (custom-file only)

Covering spec:
  {"kind": "axis-split", "intervals": [[lo, hi], ...]}   (axis 0, box units,
   hi may exceed the side to wrap; intervals may overlap and must cover)

Per kind:
  surgery-sweep : atoms, donors (list of atom specs), covering, radii,
                  p_grid (numbers or "inf"), weight_exponents, test_functions {count}
                  CSV: r,p,weight_exponent,worst_rel_error,fitted_slope,
                       lower_bound,upper_bound,overlap_count
  gabor-quilt   : donors (list of {time_step, freq_step, time_offset, freq_offset}),
                  envelope {C, exponent}  (TF-side check), covering (on the TF box),
                  radii
                  CSV: r,lower_bound,upper_bound,rank,deviation,certified,
                       signal_lower,signal_upper
  sis-quilt     : lattice {steps}, reference_generators, donors (list of
                  generator lists), covering, radii
                  CSV: r,lower_bound,upper_bound,deviation,certified
  sampling      : atoms, donors (list of {spacing, offset}), covering, radii,
                  p, weight_exponent, test_functions {count}
                  CSV: r,A_r,B_r,recon_rel_error,n_points
  multiplier    : lattice {time_step, freq_step}, reference_pairs, probes
                  (list of pair lists), covering (on the TF box), radii
                  CSV: r,n_probes,smallest_singular_value,mask_rel_error,hs_residual

Exit codes: 0 success, 1 input error, 2 certification refusal.
Environment: FRAME_FORGE_THREADS sets the worker count (outputs do not depend on it).
)";
}

}  // namespace frameforge
