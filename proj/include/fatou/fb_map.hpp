#pragma once

// The basin biholomorphism pair: psi = lim G^{-k} o T o F^k on the regularity
// neighborhood (extended over the basin through the pullback chain) and the
// entire inverse theta = lim h^k o T^{-1} o G^k, with residual checks of the
// defining functional equations.
//
// All evaluator arithmetic happens in the normalized chart: fixed point at
// the origin, linear part lower-triangularized by the unitary frame of the
// regularity neighborhood.

#include <memory>
#include <optional>
#include <vector>

#include "fatou/continuation.hpp"
#include "fatou/dynamics.hpp"
#include "fatou/matrix_engine.hpp"
#include "fatou/normal_form.hpp"
#include "fatou/poly.hpp"

namespace fatou {

struct PipelineOptions {
    int m = 8;               // normal-form order
    double margin = 0.05;    // alpha margin over the spectral radius
    double res_tol = 1e-8;   // resonance tolerance, relative
    double psi_tol = 1e-11;  // psi convergence threshold
    int k_max = 200;
    int theta_extra_steps = 6;  // extra contraction steps past rho/2
    RegularityOptions regularity;
};

// Everything derived from one HoloMap: certified neighborhood, normal form,
// exact polynomial inverse of G, formal inverse of T, and the normalized
// chart evaluators.
struct FBPipeline {
    HoloMap h;
    RegularityNbhd R;
    NormalFormResult nf;
    PolyMap F_germ;      // attracting inverse germ, normalized chart
    PolyMap h_loc_germ;  // germ of h in the normalized chart
    PolyMap G_inv;       // exact polynomial inverse of G
    PolyMap T_inv;       // formal inverse of T to order m-1
    PipelineOptions opts;

    CompiledMap cG, cG_inv, cT, cT_inv;

    CVec to_local(const CVec& p) const { return R.frame.adjoint() * (p - h.fixed_point); }
    CVec from_local(const CVec& x) const { return h.fixed_point + R.frame * x; }
    double scaled(const CVec& local) const;  // || E^{-1} x ||

    CVec h_local(const CVec& x) const;
    CVec f_local(const CVec& x) const;  // principal inverse branch
    bool in_R_local(const CVec& x) const { return scaled(x) < R.rho; }

    CVec apply_G_inv(const CVec& w, int times) const;
    CVec apply_G(const CVec& w, int times) const;
};

std::shared_ptr<const FBPipeline> build_pipeline(const HoloMap& h, const PipelineOptions& opts = {});

struct ConvergenceLog {
    std::vector<std::pair<int, double>> deltas;  // (k, ||psi_{k+1} - psi_k||)
    int stopped_at = 0;
    // Largest ratio of consecutive deltas at k >= burn_in, ignoring entries
    // at the roundoff floor; nullopt when convergence left no such pair.
    std::optional<double> decay_ratio(int burn_in, double floor = 1e-14) const;
};

class FBMapEvaluator {
public:
    FBMapEvaluator(std::shared_ptr<const FBPipeline> pipe, int k_max = 0, double tol = 0.0);

    const FBPipeline& pipeline() const { return *pipe_; }

    // psi at a point of R (original coordinates); value in normalized target
    // coordinates.  psi(fixed point) = 0 and d psi = id there.
    CVec psi(const CVec& z, ConvergenceLog* log = nullptr) const;

    // psi continued along the principal pullback chain: level n, witness in R
    // with h^n(witness) = p.
    CVec psi_on_witness(int level, const CVec& witness, ConvergenceLog* log = nullptr) const;

    // psi over any basin point via basin_membership (principal sheet).
    CVec psi_global(const CVec& p, int k_max_membership = 60) const;

    CVec psi_on_sheet(const RiemannPoint& x) const;

    CMatrix jacobian_fd(const CVec& z, double step = 1e-5) const;

private:
    std::shared_ptr<const FBPipeline> pipe_;
    int k_max_;
    double tol_;
};

class ThetaEvaluator {
public:
    ThetaEvaluator(std::shared_ptr<const FBPipeline> pipe, int k_max = 0, double tol = 0.0);

    const FBPipeline& pipeline() const { return *pipe_; }

    // theta(w) for any w (normalized coordinates in and out).  level/witness,
    // when requested, record the chain: h^level(witness) = theta(w) with
    // witness in R (original coordinates).
    CVec theta(const CVec& w, int* level_out = nullptr, CVec* witness_out = nullptr) const;

private:
    std::shared_ptr<const FBPipeline> pipe_;
    int k_max_;
};

struct ResidualReport {
    double conjugacy = 0.0;       // max || psi(F z) - G(psi z) ||, z in R
    double inverse_step = 0.0;    // max || h(theta(G w)) - theta(w) ||
    double roundtrip = 0.0;       // max || theta(psi z) - z || near 0
    int samples = 0;
};

ResidualReport functional_residuals(const FBMapEvaluator& e, const ThetaEvaluator& t, int samples,
                                    uint64_t seed = 0x5eed);

// A Riemann-domain point x with psi(x) = w, built from theta's own chain.
RiemannPoint surjectivity_witness(const FBMapEvaluator& e, const ThetaEvaluator& t, const CVec& w,
                                  const SheetClassify& classify = nullptr);

SheetPsi make_sheet_psi(std::shared_ptr<const FBPipeline> pipe);

// Taylor germ of theta at w: x -> theta(w + x) - theta(w), to order trunc,
// by composing exact shifted polynomial germs along theta's own chain.  Valid
// when h's germ is the map itself (polynomial automorphisms).
PolyMap theta_germ_at(const FBPipeline& p, const CVec& w, int trunc);

}  // namespace fatou
