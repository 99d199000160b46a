#pragma once

#include "fb/series.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fb {

using Vec = std::vector<Scalar>;

// Connection in the base directions: nabla_i = d/dt_i + u^-1 A[i].
struct TStruct {
    ParamSpec spec;
    VarList vars;
    int rank = 0;
    std::vector<SeriesMatrix> A;
    TruncOrder order;

    // Throws DimensionMismatch/NotInRing/Invalid on malformed data.
    void validate() const;
    const SeriesMatrix &matrix(const std::string &var) const { return A[vars.require(var)]; }
};

// Adds nabla_u = d/du + u^-2 U + u^-1 w E_lambda, where E_lambda is the
// Euler derivation of the equivariant parameters acting on coefficients.
// w = 0 gives an R-linear F-bundle; the equivariant models use w = 1.
struct FBund {
    TStruct t;
    SeriesMatrix U;
    int lambda_weight = 0;

    void validate() const;
};

struct FlatnessReport {
    struct Residual {
        std::string directions; // "t1,t2" or "u,t1"
        std::string monomial;
        ScalarMatrix value;
    };
    bool flat = true;
    int checked = 0;
    std::vector<Residual> residuals; // first nonzero coefficient per failing pair
};

// Residual u(d_i A_j - d_j A_i) + [A_i, A_j] for every pair; for F-bundles
// also u d_i U + u A_i - u^2 d_u A_i + [A_i, U] - u w E_lambda(A_i).
FlatnessReport check_flatness(const TStruct &t);
FlatnessReport check_flatness(const FBund &b);

struct Residues {
    std::vector<ScalarMatrix> mu; // A_i(t=0, u=0)
    ScalarMatrix K;               // U(t=0, u=0)
};
Residues residues(const TStruct &t);
Residues residues(const FBund &b);

// Columns mu[i] v.
ScalarMatrix mu_v_matrix(const TStruct &t, const Vec &v);

enum class Mode { TStructure, FBundle };
enum class Tri { False, True, Unknown };
const char *tri_name(Tri t);

struct ConditionReport {
    bool ic = false;
    bool gc = false;
    bool gc_prime = false;
    Tri coker_free = Tri::Unknown;
    ScalarMatrix mu_matrix;
    std::vector<Vec> orbit;          // distinct orbit vectors, breadth-first
    std::vector<Vec> orbit_basis;    // rank-increasing subset of orbit
    std::vector<int> best_subset;    // indices into orbit of the best n-subset
    Scalar best_det;
    std::vector<Scalar> needed_localizations;
    bool orbit_truncated = false;
};

ConditionReport check_conditions(const TStruct &t, const Vec &v);
ConditionReport check_conditions(const FBund &b, const Vec &v, Mode mode = Mode::FBundle);

struct MaximalCertificate {
    bool maximal = false;
    Scalar det;
    std::string reason;
};
MaximalCertificate check_maximal(const TStruct &t, const Vec &v);

struct MinorSearch {
    bool found_unit = false;
    std::vector<int> subset; // indices into the candidates
    Scalar det;
};

// Looks for n columns among cands (the first `fixed` always included) with a
// unit determinant, else keeps the one whose non-unit part has least degree.
MinorSearch search_minor(const std::vector<Vec> &cands, int fixed, int n, const ParamSpec &spec);

// Non-unit part of the numerator of s in the ring of spec (1 for units).
Scalar non_unit_factor(const Scalar &s, const ParamSpec &spec);
bool safe_is_unit(const Scalar &s, const ParamSpec &spec);

// Restriction to a subset of the variables (the others set to zero) and the
// trivial extension to more variables (zero connection matrices).
TStruct restrict_to(const TStruct &t, const VarList &sub);
FBund restrict_to(const FBund &b, const VarList &sub);

Vec unit_vector(int n, int i);
// "e3", "1" (first basis vector) or a comma-separated list of scalars.
Vec parse_vector(const std::string &text, int n);
std::string vec_string(const Vec &v);

} // namespace fb
