#include "fatou/fb_map.hpp"

#include <cmath>

namespace fatou {

double FBPipeline::scaled(const CVec& local) const {
    double s = 0.0;
    for (int i = 0; i < R.dim; ++i) s += std::norm(local[i] / R.scaling(i, i));
    return std::sqrt(s);
}

CVec FBPipeline::h_local(const CVec& x) const { return to_local(h.forward(from_local(x))); }

CVec FBPipeline::f_local(const CVec& x) const {
    return to_local(pullback_step(h, from_local(x)));
}

CVec FBPipeline::apply_G_inv(const CVec& w, int times) const {
    CVec v = w;
    for (int i = 0; i < times; ++i) v = cG_inv.eval(v);
    return v;
}

CVec FBPipeline::apply_G(const CVec& w, int times) const {
    CVec v = w;
    for (int i = 0; i < times; ++i) v = cG.eval(v);
    return v;
}

std::shared_ptr<const FBPipeline> build_pipeline(const HoloMap& h, const PipelineOptions& opts) {
    auto pipe = std::make_shared<FBPipeline>();
    pipe->h = h;
    pipe->opts = opts;

    RegularityOptions ropt = opts.regularity;
    ropt.margin = opts.margin;
    pipe->R = find_regularity_neighborhood(h, ropt);

    // Attracting inverse germ in the normalized chart.
    int trunc = std::max(opts.m - 1, h.germ.trunc());
    PolyMap f_inv = map_inverse_formal(h.germ, trunc);
    pipe->F_germ = conjugate_by_unitary(f_inv, pipe->R.frame, trunc);
    pipe->F_germ.prune_below(1e-15 * std::max(1.0, pipe->F_germ.max_abs_coeff()));
    pipe->h_loc_germ = conjugate_by_unitary(h.germ, pipe->R.frame, trunc);

    pipe->nf = poincare_dulac(pipe->F_germ.truncated(opts.m - 1), opts.m, opts.res_tol);

    // Triangular polynomial automorphisms invert exactly at a finite order;
    // verify that the formal inverse closed.
    int inv_trunc = std::max(24, 2 * (opts.m - 1));
    pipe->G_inv = map_inverse_formal(pipe->nf.G, inv_trunc);
    pipe->G_inv.prune_below(1e-14);
    PolyMap round = map_sub(map_compose(pipe->nf.G, pipe->G_inv, inv_trunc),
                            PolyMap::identity(h.dim, inv_trunc));
    if (round.max_abs_coeff() > 1e-10)
        throw NumericalError("build_pipeline: G inverse did not close at order " +
                             std::to_string(inv_trunc));

    pipe->T_inv = map_inverse_formal(pipe->nf.T, opts.m - 1);

    pipe->cG = CompiledMap(pipe->nf.G);
    pipe->cG_inv = CompiledMap(pipe->G_inv);
    pipe->cT = CompiledMap(pipe->nf.T);
    pipe->cT_inv = CompiledMap(pipe->T_inv);
    return pipe;
}

std::optional<double> ConvergenceLog::decay_ratio(int burn_in, double floor) const {
    std::optional<double> worst;
    for (size_t i = 1; i < deltas.size(); ++i) {
        if (deltas[i - 1].first < burn_in) continue;
        if (deltas[i - 1].second <= floor || deltas[i].second <= floor) continue;
        double r = deltas[i].second / deltas[i - 1].second;
        if (!worst || r > *worst) worst = r;
    }
    return worst;
}

// ------------------------------------------------------------ FBMapEvaluator

FBMapEvaluator::FBMapEvaluator(std::shared_ptr<const FBPipeline> pipe, int k_max, double tol)
    : pipe_(std::move(pipe)),
      k_max_(k_max > 0 ? k_max : pipe_->opts.k_max),
      tol_(tol > 0.0 ? tol : pipe_->opts.psi_tol) {}

CVec FBMapEvaluator::psi(const CVec& z, ConvergenceLog* log) const {
    const FBPipeline& p = *pipe_;
    CVec x = p.to_local(z);
    if (!p.in_R_local(x) && p.scaled(x) > p.R.rho * (1.0 + 1e-9))
        throw PreconditionError("psi: point outside the regularity neighborhood");

    CVec y = x;
    CVec prev = p.cT.eval(y);  // k = 0
    double last_delta = 0.0;
    for (int k = 1; k <= k_max_; ++k) {
        y = p.f_local(y);
        if (!is_finite(y)) throw NumericalError("psi: inverse branch failed inside R");
        CVec cur = p.apply_G_inv(p.cT.eval(y), k);
        last_delta = (cur - prev).norm();
        if (log) {
            log->deltas.push_back({k, last_delta});
            log->stopped_at = k;
        }
        if (last_delta < tol_ * (1.0 + cur.norm())) return cur;
        prev = cur;
    }
    throw NumericalError("psi: no convergence within k_max (last delta " +
                         format_double(last_delta) + ")");
}

CVec FBMapEvaluator::psi_on_witness(int level, const CVec& witness, ConvergenceLog* log) const {
    CVec base = psi(witness, log);
    return pipe_->apply_G_inv(base, level);
}

CVec FBMapEvaluator::psi_global(const CVec& p, int k_max_membership) const {
    auto m = basin_membership(pipe_->h, pipe_->R, p, k_max_membership);
    if (m.status != Membership::member)
        throw NumericalError("psi_global: point not certified as a basin member");
    return psi_on_witness(*m.level, *m.witness);
}

CVec FBMapEvaluator::psi_on_sheet(const RiemannPoint& x) const {
    return psi_on_witness(x.level, x.witness);
}

CMatrix FBMapEvaluator::jacobian_fd(const CVec& z, double step) const {
    int n = pipe_->h.dim;
    CMatrix j(n, n);
    for (int k = 0; k < n; ++k) {
        CVec zp = z, zm = z;
        zp[k] += step;
        zm[k] -= step;
        CVec d = (psi(zp) - psi(zm)) / (2.0 * step);
        for (int i = 0; i < n; ++i) j(i, k) = d[i];
    }
    return j;
}

// ------------------------------------------------------------ ThetaEvaluator

ThetaEvaluator::ThetaEvaluator(std::shared_ptr<const FBPipeline> pipe, int k_max, double)
    : pipe_(std::move(pipe)), k_max_(k_max > 0 ? k_max : pipe_->opts.k_max) {}

CVec ThetaEvaluator::theta(const CVec& w, int* level_out, CVec* witness_out) const {
    const FBPipeline& p = *pipe_;
    // Contract under G until well inside the neighborhood, then a few extra
    // steps: the inner truncation error shrinks faster than h^k amplifies it.
    CVec g = w;
    int k = 0;
    while (p.scaled(g) >= 0.5 * p.R.rho) {
        g = p.cG.eval(g);
        if (!is_finite(g) || g.norm() > 1e100)
            throw NumericalError("theta: contraction iterates diverged");
        if (++k > k_max_) throw NumericalError("theta: k_max exceeded before contraction");
    }
    for (int extra = 0; extra < p.opts.theta_extra_steps; ++extra) {
        g = p.cG.eval(g);
        ++k;
    }
    CVec y = p.cT_inv.eval(g);
    if (witness_out) *witness_out = p.from_local(y);
    if (level_out) *level_out = k;
    CVec x = y;
    for (int j = 0; j < k; ++j) {
        x = p.h_local(x);
        if (!is_finite(x)) throw NumericalError("theta: forward iterate failed");
    }
    return x;
}

// ------------------------------------------------------------------ residual

ResidualReport functional_residuals(const FBMapEvaluator& e, const ThetaEvaluator& t, int samples,
                                    uint64_t seed) {
    const FBPipeline& p = e.pipeline();
    Rng rng(seed);
    ResidualReport rep;
    rep.samples = samples;
    int n = p.h.dim;

    for (int s = 0; s < samples; ++s) {
        // (a) conjugacy on R: psi(F z) = G(psi z).
        CVec u = rng.ball_point(n, 0.8 * p.R.rho);
        CVec x_loc = p.R.scaling * u;
        CVec z = p.from_local(x_loc);
        CVec psi_z = e.psi(z);
        CVec fz = p.from_local(p.f_local(x_loc));
        double ra = (e.psi(fz) - p.cG.eval(psi_z)).norm();
        rep.conjugacy = std::max(rep.conjugacy, ra);

        // (b) one-step form of the inverse limit: h(theta(G w)) = theta(w).
        CVec w = rng.ball_point(n, 1.0);
        CVec tw = t.theta(w);
        CVec tgw = t.theta(p.cG.eval(w));
        double rb = (p.h_local(tgw) - tw).norm();
        rep.inverse_step = std::max(rep.inverse_step, rb);

        // (c) round trip near the fixed point.
        CVec u2 = rng.ball_point(n, 0.25 * p.R.rho);
        CVec z2 = p.from_local(p.R.scaling * u2);
        CVec back = t.theta(e.psi(z2));
        double rc = (back - p.to_local(z2)).norm();
        rep.roundtrip = std::max(rep.roundtrip, rc);
    }
    return rep;
}

RiemannPoint surjectivity_witness(const FBMapEvaluator& e, const ThetaEvaluator& t, const CVec& w,
                                  const SheetClassify& classify) {
    const FBPipeline& p = e.pipeline();
    RiemannPoint rp;
    int level = 0;
    CVec witness;
    CVec base_local = t.theta(w, &level, &witness);
    rp.base = p.from_local(base_local);
    rp.level = level;
    rp.witness = witness;
    rp.psi_value = e.psi_on_witness(level, witness);
    if (classify && level >= 1) {
        CVec q = witness;
        for (int j = 0; j < level - 1; ++j) q = p.h.forward(q);
        rp.sheet = classify(rp.base, q);
    } else {
        rp.sheet = p.h.branches.trivial();
    }
    return rp;
}

SheetPsi make_sheet_psi(std::shared_ptr<const FBPipeline> pipe) {
    return [pipe](int level, const CVec& witness) {
        FBMapEvaluator ev(pipe);
        return ev.psi_on_witness(level, witness);
    };
}

PolyMap theta_germ_at(const FBPipeline& p, const CVec& w, int trunc) {
    int k = 0;
    CVec g = w;
    while (p.scaled(g) >= 0.5 * p.R.rho) {
        g = p.cG.eval(g);
        if (!is_finite(g) || g.norm() > 1e100)
            throw NumericalError("theta_germ_at: contraction iterates diverged");
        if (++k > p.opts.k_max) throw NumericalError("theta_germ_at: k_max exceeded");
    }
    k += p.opts.theta_extra_steps;

    // Germ of G^k at w by chained shifted composition.
    PolyMap cur = shift_germ(p.nf.G, w, trunc);
    CVec base = p.cG.eval(w);
    for (int j = 2; j <= k; ++j) {
        cur = map_compose(shift_germ(p.nf.G, base, trunc), cur, trunc);
        base = p.cG.eval(base);
    }
    cur = map_compose(shift_germ(p.T_inv, base, trunc), cur, trunc);
    base = p.cT_inv.eval(base);
    for (int j = 1; j <= k; ++j) {
        cur = map_compose(shift_germ(p.h_loc_germ, base, trunc), cur, trunc);
        base = p.h_loc_germ.eval(base);
    }
    return cur;
}

}  // namespace fatou
