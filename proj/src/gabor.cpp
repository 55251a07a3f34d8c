#include "frameforge/gabor.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "frameforge/fft.hpp"

namespace frameforge {

namespace {

int commensurate_steps(double value, double unit, const char* what) {
    const double ratio = value / unit;
    const long k = std::lround(ratio);
    if (std::abs(ratio - k) > 1e-9)
        throw std::invalid_argument(std::string("TFLattice: ") + what +
                                    " not commensurate with the grid");
    return static_cast<int>(k);
}

}  // namespace

GridFunction gauss_window(const Box& box) {
    const long total = box.total_points();
    GridFunction g(total);
    const double norm_const = std::pow(M_PI, -0.25 * box.dim());
    for (long i = 0; i < total; ++i) {
        const Point p = box.point(i);
        double r2 = 0;
        for (int a = 0; a < box.dim(); ++a) {
            const double c = box.centered(p[a]);
            r2 += c * c;
        }
        g[i] = norm_const * std::exp(-0.5 * r2);
    }
    return g;
}

TFLattice::TFLattice(Box signal_box, double time_step, double freq_step,
                     double time_offset, double freq_offset)
    : signal_box_(signal_box),
      time_step_(time_step),
      freq_step_(freq_step),
      time_offset_(time_offset),
      freq_offset_(freq_offset) {
    if (signal_box_.dim() != 1)
        throw std::invalid_argument("TFLattice: signal box must be 1-d");
    const double h = signal_box_.step();
    const double fstep = 1.0 / signal_box_.side();
    if (commensurate_steps(time_step_, h, "time step") < 1)
        throw std::invalid_argument("TFLattice: time step must be positive");
    if (commensurate_steps(freq_step_, fstep, "frequency step") < 1)
        throw std::invalid_argument("TFLattice: frequency step must be positive");
    commensurate_steps(time_offset_, h, "time offset");
    commensurate_steps(freq_offset_, fstep, "frequency offset");

    const double L = signal_box_.side();
    const double freq_extent = signal_box_.points_per_axis() / L;  // 1/h
    n_time_ = commensurate_steps(L, time_step_, "period / time step");
    n_freq_ = commensurate_steps(freq_extent, freq_step_, "bandwidth / frequency step");
}

Point TFLattice::point(long idx) const {
    const long it = idx / n_freq_;
    const long iw = idx % n_freq_;
    const double L = signal_box_.side();
    const double freq_extent = signal_box_.points_per_axis() / L;
    double x = std::fmod(time_offset_ + it * time_step_, L);
    double w = std::fmod(freq_offset_ + iw * freq_step_, freq_extent);
    return {x, w};
}

Box TFLattice::tf_box() const {
    const double L = signal_box_.side();
    const long n = signal_box_.points_per_axis();
    if (std::abs(L * L - n) > 1e-9)
        throw std::invalid_argument(
            "TFLattice: tf box needs N = L^2 so both TF axes share the side L");
    return Box(2, L, static_cast<int>(n));
}

NodeSet TFLattice::tf_nodes() const {
    Box tb = tf_box();
    std::vector<Point> pos;
    pos.reserve(size());
    for (long i = 0; i < size(); ++i) pos.push_back(point(i));
    return NodeSet(tb, pos);
}

GridFunction tf_atom(const Box& signal_box, const Point& lambda,
                     const GridFunction& g) {
    if (signal_box.dim() != 1)
        throw std::invalid_argument("tf_atom: signal box must be 1-d");
    const int n = signal_box.points_per_axis();
    const double h = signal_box.step();
    const long shift = std::lround(lambda[0] / h);
    const double w = lambda[1];
    GridFunction out(n);
    for (int j = 0; j < n; ++j) {
        const long src = ((j - shift) % n + n) % n;
        const double phase = 2.0 * M_PI * w * (j * h);
        out[j] = Complex(std::cos(phase), std::sin(phase)) * g[src];
    }
    return out;
}

STFTImage stft(const Box& signal_box, const GridFunction& f,
               const GridFunction& window) {
    if (signal_box.dim() != 1)
        throw std::invalid_argument("stft: signal box must be 1-d");
    const int n = signal_box.points_per_axis();
    const double L = signal_box.side();
    if (std::abs(L * L - n) > 1e-9)
        throw std::invalid_argument("stft: tf box needs N = L^2");
    Box tf(2, L, n);
    GridFunction values(tf.total_points());
    GridFunction windowed(n);
    for (int j = 0; j < n; ++j) {
        for (int y = 0; y < n; ++y)
            windowed[y] = f[y] * std::conj(window[((y - j) % n + n) % n]);
        // <f, M_w T_x phi> = DFT of f * conj(T_x phi) with h quadrature.
        GridFunction spectrum = dft(signal_box, windowed, -1) * signal_box.step();
        for (int m = 0; m < n; ++m) values[static_cast<long>(j) * n + m] = spectrum[m];
    }
    return STFTImage{tf, std::move(values)};
}

SpectrumInfo gabor_frame_bounds(const TFLattice& lattice, const GridFunction& g) {
    const Box& box = lattice.signal_box();
    const long n = box.total_points();
    Eigen::MatrixXcd atoms(n, lattice.size());
    for (long k = 0; k < lattice.size(); ++k)
        atoms.col(k) = tf_atom(box, lattice.point(k), g);
    Eigen::MatrixXcd S = atoms * atoms.adjoint() * box.cell_measure();
    return spectrum_of(0.5 * (S + S.adjoint()));
}

GaborMolecules gabor_system(const TFLattice& lattice, const GridFunction& window) {
    GaborMolecules mol{lattice.tf_nodes(), {}};
    mol.signal_atoms.reserve(lattice.size());
    for (long k = 0; k < lattice.size(); ++k)
        mol.signal_atoms.push_back(tf_atom(lattice.signal_box(), lattice.point(k), window));
    return mol;
}

GaborQuiltSetup prepare_gabor_quilt(const Box& signal_box,
                                    std::vector<GaborMolecules> donors,
                                    const Envelope& tf_envelope) {
    const long n = signal_box.total_points();
    const GridFunction window = gauss_window(signal_box);
    GaborQuiltSetup setup{signal_box, Box(2, signal_box.side(), signal_box.points_per_axis()),
                          {}, {}, {}, SpanBasis{signal_box, {}}};
    {
        // Validity of the square TF box (N = L^2) is checked via stft below.
        STFTImage probe = stft(signal_box, window, window);
        setup.tf_box = probe.tf_box;
    }

    // STFT-image span basis: isometric image of the signal delta basis.
    Eigen::MatrixXcd tf_basis(setup.tf_box.total_points(), n);
    const double root_h = std::sqrt(signal_box.cell_measure());
    for (long y = 0; y < n; ++y) {
        GridFunction e = GridFunction::Zero(n);
        e[y] = 1.0 / root_h;
        tf_basis.col(y) = stft(signal_box, e, window).values;
    }
    setup.tf_span = SpanBasis{setup.tf_box, std::move(tf_basis)};

    for (auto& donor : donors) {
        const std::size_t m = donor.signal_atoms.size();
        if (m != donor.tf_nodes.size())
            throw std::invalid_argument("prepare_gabor_quilt: node/atom count mismatch");
        Eigen::MatrixXcd atoms(n, static_cast<long>(m));
        for (std::size_t k = 0; k < m; ++k) atoms.col(static_cast<long>(k)) = donor.signal_atoms[k];

        Eigen::MatrixXcd S = atoms * atoms.adjoint() * signal_box.cell_measure();
        SpectrumInfo sb = spectrum_of(0.5 * (S + S.adjoint()));
        if (!(sb.lower > 0) || sb.rank < n)
            throw std::invalid_argument(
                "prepare_gabor_quilt: donor is not a frame for the signal space");
        setup.donor_signal_bounds.push_back(sb);

        // Canonical signal-side duals S^{-1} g_k, then map both families
        // through the STFT.
        Eigen::LDLT<Eigen::MatrixXcd> solver(0.5 * (S + S.adjoint()));
        Eigen::MatrixXcd duals = solver.solve(atoms);

        std::vector<GridFunction> tf_analysis, tf_synthesis;
        tf_analysis.reserve(m);
        tf_synthesis.reserve(m);
        for (std::size_t k = 0; k < m; ++k) {
            tf_analysis.push_back(stft(signal_box, atoms.col(static_cast<long>(k)), window).values);
            tf_synthesis.push_back(stft(signal_box, duals.col(static_cast<long>(k)), window).values);
        }
        // The envelope on the analysis molecules is verified on construction.
        AtomFamily analysis(donor.tf_nodes, std::move(tf_analysis), tf_envelope);
        AtomFamily synthesis(donor.tf_nodes, std::move(tf_synthesis));
        setup.tf_donors.push_back(
            FramePair{std::move(synthesis), std::move(analysis), sb.lower, sb.upper});
        setup.donors.push_back(std::move(donor));
    }
    return setup;
}

GaborQuiltResult quilt_gabor(const GaborQuiltSetup& setup,
                             const Covering& tf_covering,
                             const PartitionOfUnity& pou, double r) {
    QuiltedSystem quilt = make_quilted(setup.tf_donors, tf_covering, r);

    GaborQuiltResult result{quilt, {}, {}, {}};
    if (quilt.total_selected() > 0)
        result.tf_bounds = quilted_frame_bounds(quilt, setup.tf_span);
    result.certificate = certify_quilt(quilt, pou, setup.tf_span);

    // Signal-side certification of the same selection: eigen-bounds of the
    // quilted frame operator sum_(k,i) <., g^i_k> g^i_k.
    const Box& sbox = setup.signal_box;
    const long n = sbox.total_points();
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < setup.donors.size(); ++i)
        for (std::size_t k : quilt.selection[i]) {
            const GridFunction& g = setup.donors[i].signal_atoms[k];
            S.noalias() += g * g.adjoint() * sbox.cell_measure();
        }
    result.signal_bounds = spectrum_of(0.5 * (S + S.adjoint()));
    if (!result.signal_bounds.eigenvalues.empty()) {
        result.signal_bounds.lower =
            std::max(result.signal_bounds.eigenvalues.front(), 0.0);
        result.signal_bounds.gap = result.signal_bounds.lower;
    }
    return result;
}

}  // namespace frameforge
