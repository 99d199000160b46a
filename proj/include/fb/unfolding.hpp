#pragma once

#include "fb/framing.hpp"

#include <string>
#include <vector>

namespace fb {

struct UnfoldResult {
    FBund bundle;  // ambient trivialization over the enlarged variables
    bool has_u = true;
    FBund framed;  // the same bundle in the induced good basis
    FBund original;
    std::vector<std::string> added;
    SeriesMatrix good_basis; // columns: the good basis in the ambient trivialization
    Vec v;
    ScalarMatrix fiber_basis; // good basis at the origin; first column v
    // f_i as series over the enlarged variables, in good-basis coordinates.
    std::vector<SeriesScalar> f;
    ConditionReport certificate;
    MaximalCertificate maximal;
};

// Unfolds a framed bundle whose first basis vector is the generating vector,
// adding new_vars in order; f (over the enlarged variables, vanishing at
// new_vars = 0) prescribes S_j e_1 = d f / d s_j.
UnfoldResult unfold_with_f(const FBund &b, const std::vector<std::string> &new_vars,
                           const std::vector<SeriesScalar> &f);
UnfoldResult unfold_with_f(const TStruct &t, const std::vector<std::string> &new_vars,
                           const std::vector<SeriesScalar> &f);

struct UnfoldOptions {
    // Complement fiber vectors to use instead of searching the orbit.
    std::vector<Vec> forced_complements;
    // Names for the added variables; defaults to s1, s2, ... avoiding clashes.
    std::vector<std::string> names;
};

UnfoldResult maximal_unfold(const FBund &b, const Vec &v, const UnfoldOptions &opt = {});
UnfoldResult maximal_unfold(const TStruct &t, const Vec &v, const UnfoldOptions &opt = {});

struct UnfoldIso {
    VarList source; // variables of the first unfolding
    VarList target; // variables of the second
    std::vector<SeriesScalar> base_map; // image of each target variable, over source
    SeriesMatrix bundle_map;            // ambient trivializations, first to pulled-back second
    std::string direction = "u1 -> u2";
    int verified_cap = 0;
};

// Throws NotComparable when the preconditions fail and NotIsomorphic with the
// first discrepancy when the intertwining check fails.
UnfoldIso compare_unfoldings(const UnfoldResult &u1, const UnfoldResult &u2);

// Potential of a framed flat structure: dP = sum_j A_j dx_j, P(0) = 0.
SeriesMatrix framed_potential(const TStruct &framed);

} // namespace fb
