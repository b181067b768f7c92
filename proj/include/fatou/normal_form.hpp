#pragma once

// Poincare-Dulac normalization of an attracting germ with lower-triangular
// linear part: produces the triangular polynomial automorphism G and the
// tangent-to-identity polynomial conjugacy T with G^{-1} o T o F - T vanishing
// below the requested order.

#include <string>
#include <vector>

#include "fatou/poly.hpp"

namespace fatou {

struct ResonanceRecord {
    int component = 0;  // 0-based
    MultiIndex alpha;
    double defect = 0.0;  // |lambda^alpha - lambda_i|
};

struct NormalFormResult {
    PolyMap G;  // lower-triangular polynomial automorphism, linear part = A
    PolyMap T;  // T(0)=0, dT(0)=id
    int order_m = 0;
    std::vector<ResonanceRecord> resonances;
    std::vector<std::string> warnings;  // ill-conditioned near-resonances
    int resonance_scan_limit = 0;       // highest degree examined for resonance
    std::vector<cdouble> lambda;        // diagonal of the linear part, in order
};

// f must fix the origin and have a lower-triangular linear part with all
// eigenvalue moduli < 1.  res_tol is relative to |lambda_i|; divisors inside
// (res_tol, 10 res_tol) produce a warning but are still divided through.
NormalFormResult poincare_dulac(const PolyMap& f, int m, double res_tol = 1e-8);

// Max coefficient magnitude below degree m of G^{-1} o T o f - T, with the
// inverse taken formally.  Independent of the construction path above.
double check_residual(const NormalFormResult& nf, const PolyMap& f);

}  // namespace fatou
