#pragma once

// Complex linear algebra for the linear part at the fixed point: spectra,
// lower-triangular Schur frames, and the diagonal scaling that certifies a
// norm-contracting neighborhood.

#include <vector>

#include "fatou/errors.hpp"
#include "fatou/types.hpp"

namespace fatou {

// Eigenvalues with multiplicity, sorted by ascending modulus (ties broken by
// real then imaginary part for determinism).
std::vector<cdouble> eigenvalues(const CMatrix& a);

struct SchurLower {
    CMatrix q;  // unitary
    CMatrix t;  // lower triangular, q* a q = t
};

// Unitary change of frame to lower-triangular form.  Already lower-triangular
// input passes through with q = id.  Otherwise the diagonal of t is ordered
// by descending modulus, which keeps resonant monomials of a contracting
// spectrum supported on earlier variables.
SchurLower lower_triangularize(const CMatrix& a);

// Certified contracting neighborhood R = frame * E_eps(B(0, rho)) around a
// fixed point (the translation lives with the map, not here).
struct RegularityNbhd {
    int dim = 0;
    double eps = 0.0;
    double rho = 0.0;  // 0 means "linear certificate only"
    double alpha = 0.0;
    CMatrix scaling;  // diag(eps^N, ..., eps), exact iterated powers
    CMatrix frame;    // unitary triangularizing change of basis
};

// Finds eps so that || E_eps^{-1} (q* a q) E_eps || <= alpha < 1, with
// alpha = (max eigenvalue modulus) + margin, capped at 0.99.  rho is left 0;
// the nonlinear radius is certified against the actual map elsewhere.
RegularityNbhd scaling_neighborhood(const CMatrix& a, double margin = 0.05);

double operator_norm(const CMatrix& m);  // largest singular value

// || E^{-1} frame^* x || for x relative to the fixed point.
double scaled_frame_norm(const RegularityNbhd& r, const CVec& x);

}  // namespace fatou
