#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frameforge/grid.hpp"

namespace frameforge {

/// Declared polynomial concentration envelope |f_k(x)| <= C (1+|x-k|)^{-e}.
struct Envelope {
    double constant;   // C > 0
    double exponent;   // s + alpha
};

/// One discretized atom per node. If an envelope is declared it is verified
/// at every grid point on construction; violations throw with the worst
/// offending (node, point) pair.
class AtomFamily {
public:
    AtomFamily(NodeSet nodes, std::vector<GridFunction> atoms,
               std::optional<Envelope> envelope = std::nullopt);

    const NodeSet& nodes() const { return nodes_; }
    const Box& box() const { return nodes_.box(); }
    std::size_t size() const { return atoms_.size(); }
    const GridFunction& atom(std::size_t k) const { return atoms_[k]; }
    const std::optional<Envelope>& envelope() const { return envelope_; }

    /// Column k holds atom k as a flat grid vector.
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    AtomFamily subset(std::span<const std::size_t> indices) const;
    AtomFamily scaled(Complex factor) const;

private:
    NodeSet nodes_;
    std::vector<GridFunction> atoms_;
    std::optional<Envelope> envelope_;
    Eigen::MatrixXcd matrix_;
};

struct FamilyAmalgamNorm {
    double value = 0;                    // max(max per_node_l1, sup_sum)
    std::vector<double> per_node_l1;     // ||g_k||_1
    double sup_sum = 0;                  // sup_x sum_k g_k(x)
    double window_cube_side = 0;
};

/// W(B, L^1_w) norm of a family with B = local sup over the closed cube
/// [x, x + side]^d; integrals are Riemann sums with weight h^d.
FamilyAmalgamNorm family_amalgam_norm(const AtomFamily& family,
                                      const Weight& w, double cube_side);

/// Matrix indexed by two node sets, with the weighted Schur-type norm
/// S_w = max(sup-row, sup-column weighted absolute sums).
class SchurMatrix {
public:
    SchurMatrix(Eigen::MatrixXcd entries, NodeSet rows, NodeSet cols);

    const Eigen::MatrixXcd& entries() const { return entries_; }
    const NodeSet& rows() const { return rows_; }
    const NodeSet& cols() const { return cols_; }
    double schur_norm(const Weight& w) const;

    std::string to_json() const;

private:
    Eigen::MatrixXcd entries_;
    NodeSet rows_;
    NodeSet cols_;
};

/// c . F = sum_k c_k f_k. Throws on length mismatch.
GridFunction synthesize(std::span<const Complex> c, const AtomFamily& family);

struct SynthesisReport {
    GridFunction result;
    double lhs;    // ||c.F||_{W(B, L^p_v)} measured
    double rhs;    // C_mod * ||c||_{l^p_v} * ||F||_{W(B, L^1_w)}
    double ratio;  // lhs / (||c|| * ||F||_W), to compare against C_mod
};

/// Synthesis with the multiplier-bound check of the synthesis estimate.
SynthesisReport synthesize_checked(std::span<const Complex> c,
                                   const AtomFamily& family, double p,
                                   const ModeratedPair& vw, double cube_side);

/// G = C . F with g_k = sum_j c_{k,j} f_j; column index set must match F.
AtomFamily matrix_apply(const SchurMatrix& C, const AtomFamily& family);

struct MatrixApplyReport {
    AtomFamily result;
    double lhs;  // ||G||_W
    double rhs;  // ||C||_{S_w} ||F||_W
};

MatrixApplyReport matrix_apply_checked(const SchurMatrix& C,
                                       const AtomFamily& family,
                                       const Weight& w, double cube_side);

/// Cross-correlation matrix C_{k,j} = <f_k, g_j> (h^d quadrature).
SchurMatrix cross_correlation(const AtomFamily& F, const AtomFamily& G);

struct CrossCorrelationReport {
    double schur_norm;
    double product_of_family_norms;
    double ratio;
};

CrossCorrelationReport cross_correlation_checked(const AtomFamily& F,
                                                 const AtomFamily& G,
                                                 const Weight& w,
                                                 double cube_side);

/// Analysis sequence c_k = <f, f_k>.
std::vector<Complex> analyze(const GridFunction& f, const AtomFamily& family);

struct AnalysisReport {
    std::vector<Complex> coefficients;
    double lhs;  // ||c||_{l^p_v}
    double rhs;  // ||f||_{L^p_v} ||F||_W
    double ratio;
};

AnalysisReport analyze_checked(const GridFunction& f, const AtomFamily& family,
                               double p, const ModeratedPair& vw,
                               double cube_side);

struct SchurLemmaRow {
    double p;
    double lhs;
    double rhs;
    bool holds;
};

struct SchurLemmaReport {
    std::vector<SchurLemmaRow> part_a;  // ||c.F||_p <= ...
    std::vector<SchurLemmaRow> part_b;  // ||(int g f_k)_k||_p <= ...
    bool all_hold() const;
};

/// Verifies both parts of the interpolation lemma for p in {1, 2, inf}
/// on the supplied data; used as the internal test oracle.
SchurLemmaReport schur_interpolation_check(const AtomFamily& family,
                                           std::span<const Complex> c,
                                           const GridFunction& g);

// --- serialization -----------------------------------------------------

std::string atom_family_to_json(const AtomFamily& family);
AtomFamily atom_family_from_json(const std::string& text);

}  // namespace frameforge
