#pragma once

// Orbits, certified regularity neighborhoods, and potential-basin membership
// for an endomorphism with a repelling fixed point, plus grid classification
// for rendering.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fatou/matrix_engine.hpp"
#include "fatou/poly.hpp"
#include "fatou/sheet.hpp"
#include "fatou/types.hpp"

namespace fatou {

// An endomorphism h with a repelling fixed point.  `inverse_branch` evaluates
// the local inverse F = h^{-1}; the SheetId selects branches of multivalued
// generators (the trivial sheet is the principal branch fixing the fixed
// point).  `germ` is the polynomial truncation of h at the fixed point in
// local coordinates x -> h(fp + x) - fp.
struct HoloMap {
    int dim = 0;
    std::string name;
    CVec fixed_point;
    PolyMap germ;
    std::function<CVec(const CVec&)> forward;
    std::function<CVec(const CVec&, const SheetId&)> inverse_branch;  // may be null
    BranchStructure branches;
};

// Non-finite components signal "no preimage reachable on this branch".
CVec pullback_step(const HoloMap& h, const CVec& p, const SheetId* sheet = nullptr);

// Damped Newton for h(y) = target from the given seed, finite-difference
// Jacobian.  Returns non-finite on stagnation.
CVec newton_inverse(const std::function<CVec(const CVec&)>& h, const CVec& target,
                    const CVec& seed, double tol, int max_iter = 60);

double scaled_norm_at(const RegularityNbhd& r, const CVec& fixed_point, const CVec& p);

struct OrbitRecord {
    std::vector<CVec> points;
    std::vector<double> scaled_norms;
    std::optional<int> entered_R_at;
    bool diverged = false;
    int broke_at = -1;  // pullback chain produced a non-finite value here
};

struct RegularityOptions {
    double margin = 0.05;
    double rho_max = 1.0;
    int rho_halvings = 40;
    int boundary_samples = 500;
    int interior_samples = 200;
    int verify_depth = 10;
    uint64_t seed = 0x5eedf00dULL;
};

// Certifies (eps, rho, alpha): largest dyadic rho whose sampled boundary and
// interior contract under one F step by factor alpha in the scaled frame,
// re-verified to depth verify_depth.
RegularityNbhd find_regularity_neighborhood(const HoloMap& h, const RegularityOptions& opt = {});

enum class Direction { forward, inverse_branch };

OrbitRecord iterate(const HoloMap& h, const RegularityNbhd* r, const CVec& z, int n,
                    Direction dir);

enum class Membership { member, non_member, unknown };

struct MembershipResult {
    Membership status = Membership::unknown;
    std::optional<int> level;    // minimal k with h^k(witness) = p
    std::optional<CVec> witness;
    std::vector<CVec> chain;     // pullback orbit starting at p
    double step_residual = 0.0;  // max per-step inverse-consistency residual
    std::string note;
};

MembershipResult basin_membership(const HoloMap& h, const RegularityNbhd& r, const CVec& p,
                                  int k_max = 60, double newton_tol = 1e-9);

// Affine 2-plane slice of C^N: point(s,t) = origin + s*span_u + t*span_v.
struct SliceSpec {
    CVec origin, span_u, span_v;
    double umin = -1, umax = 1, vmin = -1, vmax = 1;
    int resolution = 256;
};

struct GridCell {
    Membership status = Membership::unknown;
    int k = -1;
};

struct GridResult {
    int resolution = 0;
    int k_max = 0;
    std::vector<GridCell> cells;  // row-major, row 0 at vmax
    const GridCell& at(int row, int col) const { return cells[size_t(row) * resolution + col]; }
};

GridResult classify_grid(const HoloMap& h, const RegularityNbhd& r, const SliceSpec& slice,
                         int k_max = 60, double newton_tol = 1e-9, int threads = 0);

CVec slice_point(const SliceSpec& slice, int row, int col);

}  // namespace fatou
