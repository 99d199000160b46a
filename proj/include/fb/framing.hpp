#pragma once

#include "fb/connection.hpp"

namespace fb {

// Change of trivialization: the new basis is the columns of P. Gauging
// differentiates P, so P should carry one t-degree more than the bundle.
struct Gauge {
    SeriesMatrix P;
    SeriesMatrix P_inv;

    static Gauge of(const SeriesMatrix &P); // P must have an invertible constant term
    static Gauge identity(const VarList &vars, const TruncOrder &ord, int n);
};

// A' = u P^-1 dP + P^-1 A P.
TStruct apply_gauge(const TStruct &t, const Gauge &g);
// Also U' = u^2 P^-1 d_u P + P^-1 U P + u w P^-1 E_lambda(P).
FBund apply_gauge(const FBund &b, const Gauge &g);

bool is_framed(const TStruct &t);
// Framed with U of u-degree at most one.
bool is_F_framed(const FBund &b);

struct Framing {
    Gauge gauge;
    TStruct framed;
};

// The unique gauge with P(0,u) = Id making every A_i u-free.
Framing compute_framing(const TStruct &t);

// Columns: the good basis restricting to the columns of fiber_basis at the
// origin, in the ambient trivialization.
SeriesMatrix extend_good_basis(const TStruct &t, const ScalarMatrix &fiber_basis);

// The unique U with U(0,u) = U0 making (t, U) flat; t must be framed.
FBund extend_u_direction(const TStruct &framed, const SeriesMatrix &U0, int lambda_weight = 0);

// Whether g turns b into an F-framing.
bool is_F_framing(const FBund &b, const Gauge &g);

} // namespace fb
