#include "fatou/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace fatou {

namespace {

CVec non_finite_vec(int n) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = cdouble(std::nan(""), std::nan(""));
    return v;
}

CMatrix fd_jacobian(const std::function<CVec(const CVec&)>& f, const CVec& x, double step) {
    int n = int(x.size());
    CMatrix j(n, n);
    for (int k = 0; k < n; ++k) {
        CVec xp = x, xm = x;
        xp[k] += step;
        xm[k] -= step;
        CVec d = (f(xp) - f(xm)) / (2.0 * step);
        for (int i = 0; i < n; ++i) j(i, k) = d[i];
    }
    return j;
}

}  // namespace

CVec newton_inverse(const std::function<CVec(const CVec&)>& h, const CVec& target,
                    const CVec& seed, double tol, int max_iter) {
    int n = int(seed.size());
    CVec y = seed;
    if (!is_finite(y)) return non_finite_vec(n);
    double scale = 1.0 + target.norm();
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        CVec res = h(y) - target;
        if (!is_finite(res)) return non_finite_vec(n);
        double rn = res.norm();
        if (rn <= tol * scale) return y;
        if (rn > 0.5 * best && it > 8) break;  // stagnation
        best = std::min(best, rn);
        CMatrix j = fd_jacobian(h, y, 1e-7 * (1.0 + y.norm()));
        Eigen::FullPivLU<CMatrix> lu(j);
        if (!lu.isInvertible()) break;
        CVec step = lu.solve(res);
        // Damping: halve until the residual improves.
        double lambda = 1.0;
        bool moved = false;
        for (int half = 0; half < 12; ++half) {
            CVec cand = y - lambda * step;
            CVec cres = h(cand) - target;
            if (is_finite(cres) && cres.norm() < rn) {
                y = cand;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!moved) break;
    }
    CVec res = h(y) - target;
    if (is_finite(res) && res.norm() <= tol * scale) return y;
    return non_finite_vec(n);
}

CVec pullback_step(const HoloMap& h, const CVec& p, const SheetId* sheet) {
    SheetId s = sheet ? *sheet : h.branches.trivial();
    if (h.inverse_branch) return h.inverse_branch(p, s);
    if (!h.forward) throw PreconditionError("pullback_step: map has no evaluators");
    // Newton fallback seeded by the linearized inverse.
    CMatrix a = h.germ.linear_part();
    Eigen::FullPivLU<CMatrix> lu(a);
    if (!lu.isInvertible()) throw PreconditionError("pullback_step: singular linear part");
    CVec seed = h.fixed_point + lu.solve(p - h.fixed_point);
    return newton_inverse(h.forward, p, seed, 1e-12);
}

double scaled_norm_at(const RegularityNbhd& r, const CVec& fixed_point, const CVec& p) {
    return scaled_frame_norm(r, p - fixed_point);
}

RegularityNbhd find_regularity_neighborhood(const HoloMap& h, const RegularityOptions& opt) {
    CMatrix a_h = h.germ.linear_part();
    Eigen::FullPivLU<CMatrix> lu(a_h);
    if (!lu.isInvertible())
        throw PreconditionError("find_regularity_neighborhood: singular linear part");
    CMatrix a_f = lu.inverse();  // linear part of the attracting inverse germ

    RegularityNbhd r = scaling_neighborhood(a_f, opt.margin);

    auto pull = [&](const CVec& p) { return pullback_step(h, p); };
    auto snorm = [&](const CVec& p) { return scaled_norm_at(r, h.fixed_point, p); };
    auto from_scaled = [&](const CVec& u) -> CVec {
        return h.fixed_point + r.frame * (r.scaling * u);
    };

    double rho = opt.rho_max;
    for (int halving = 0; halving <= opt.rho_halvings; ++halving, rho *= 0.5) {
        if (rho < 1e-8) break;
        Rng rng(opt.seed);
        bool ok = true;
        // One-step contraction on the boundary sphere and at interior radii.
        for (int s = 0; ok && s < opt.boundary_samples + opt.interior_samples; ++s) {
            double rad = s < opt.boundary_samples ? rho : rho * std::pow(rng.uniform(), 0.5);
            if (rad < 1e-12) continue;
            CVec x = from_scaled(rng.sphere_point(h.dim, rad));
            CVec fx = pull(x);
            if (!is_finite(fx) || snorm(fx) > r.alpha * rad) ok = false;
        }
        // Iterated contraction F^n(R) within alpha^n rho on a subsample.
        for (int s = 0; ok && s < 50; ++s) {
            CVec x = from_scaled(rng.sphere_point(h.dim, rho));
            for (int n = 1; n <= opt.verify_depth && ok; ++n) {
                x = pull(x);
                if (!is_finite(x) || snorm(x) > std::pow(r.alpha, n) * rho * (1.0 + 1e-9))
                    ok = false;
            }
        }
        if (ok) {
            r.rho = rho;
            return r;
        }
    }
    throw NumericalError("find_regularity_neighborhood: degenerate neighborhood (no rho above 1e-8)");
}

OrbitRecord iterate(const HoloMap& h, const RegularityNbhd* r, const CVec& z, int n,
                    Direction dir) {
    OrbitRecord orbit;
    CVec x = z;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            x = dir == Direction::forward ? h.forward(x) : pullback_step(h, x);
            if (!is_finite(x)) {
                orbit.broke_at = k;
                break;
            }
            if (x.norm() > 1e100) {
                orbit.diverged = true;
                break;
            }
        }
        orbit.points.push_back(x);
        if (r) {
            double sn = scaled_norm_at(*r, h.fixed_point, x);
            orbit.scaled_norms.push_back(sn);
            if (!orbit.entered_R_at && sn < r->rho) orbit.entered_R_at = k;
        }
    }
    return orbit;
}

MembershipResult basin_membership(const HoloMap& h, const RegularityNbhd& r, const CVec& p,
                                  int k_max, double newton_tol) {
    if (r.rho <= 0.0) throw PreconditionError("basin_membership: neighborhood not certified");
    MembershipResult res;
    res.chain.push_back(p);

    double sn = scaled_norm_at(r, h.fixed_point, p);
    if (sn < r.rho) {
        res.status = Membership::member;
        res.level = 0;
        res.witness = p;
        return res;
    }

    // Pullback chain under the principal inverse branch.  A non-finite step
    // means no preimage is reachable there; treated as divergence.
    std::vector<double> norms{sn};
    CVec y = p;
    int broke_at = -1;
    bool had_candidate_failure = false;
    for (int k = 1; k <= k_max; ++k) {
        CVec y_next = pullback_step(h, y);
        if (!is_finite(y_next)) {
            broke_at = k;
            break;
        }
        // Inverse-consistency certificate for this step.
        CVec fwd = h.forward(y_next);
        double step_res = is_finite(fwd) ? (fwd - y).norm() : std::numeric_limits<double>::infinity();
        y = y_next;
        res.chain.push_back(y);
        double syn = scaled_norm_at(r, h.fixed_point, y);
        norms.push_back(syn);
        if (syn < r.rho) {
            if (step_res <= newton_tol * (1.0 + y.norm()) || step_res == 0.0) {
                res.status = Membership::member;
                res.level = k;
                res.witness = y;
                res.step_residual = std::max(res.step_residual, step_res);
                return res;
            }
            had_candidate_failure = true;
            res.note = "witness rejected: step residual " + format_double(step_res);
        }
        res.step_residual = std::max(res.step_residual, step_res);
    }

    // Never entered R.  Claim non-membership only when the chain broke or
    // made no progress toward R over the second half of the budget.
    double min_early = std::numeric_limits<double>::infinity();
    double min_late = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < norms.size(); ++i) {
        if (int(i) <= k_max / 2)
            min_early = std::min(min_early, norms[i]);
        else
            min_late = std::min(min_late, norms[i]);
    }
    bool no_progress = norms.size() > size_t(k_max / 2 + 1) && min_late >= 0.9 * min_early;
    if (!had_candidate_failure && (broke_at >= 0 || no_progress)) {
        res.status = Membership::non_member;
        res.note = broke_at >= 0 ? "pullback chain has no preimage at step " + std::to_string(broke_at)
                                 : "pullback chain stalled outside R";
    } else {
        res.status = Membership::unknown;
        if (res.note.empty()) res.note = "budget exhausted without entering R";
    }
    return res;
}

CVec slice_point(const SliceSpec& slice, int row, int col) {
    double du = (slice.umax - slice.umin) / slice.resolution;
    double dv = (slice.vmax - slice.vmin) / slice.resolution;
    double s = slice.umin + (col + 0.5) * du;
    double t = slice.vmax - (row + 0.5) * dv;
    return slice.origin + s * slice.span_u + t * slice.span_v;
}

GridResult classify_grid(const HoloMap& h, const RegularityNbhd& r, const SliceSpec& slice,
                         int k_max, double newton_tol, int threads) {
    if (slice.resolution < 2) throw PreconditionError("classify_grid: resolution must be >= 2");
    if (slice.span_u.norm() == 0.0 || slice.span_v.norm() == 0.0 ||
        slice.umax <= slice.umin || slice.vmax <= slice.vmin)
        throw PreconditionError("classify_grid: degenerate slice window");

    GridResult grid;
    grid.resolution = slice.resolution;
    grid.k_max = k_max;
    grid.cells.assign(size_t(slice.resolution) * slice.resolution, GridCell{});

    int nthreads = threads > 0 ? threads : int(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;

    std::atomic<int> next_row{0};
    auto worker = [&]() {
        for (;;) {
            int row = next_row.fetch_add(1);
            if (row >= slice.resolution) return;
            for (int col = 0; col < slice.resolution; ++col) {
                GridCell cell;
                try {
                    auto m = basin_membership(h, r, slice_point(slice, row, col), k_max, newton_tol);
                    cell.status = m.status;
                    cell.k = m.level.value_or(-1);
                } catch (const std::exception&) {
                    cell.status = Membership::unknown;
                }
                grid.cells[size_t(row) * slice.resolution + col] = cell;
            }
        }
    };

    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return grid;
}

std::string SheetId::str() const {
    std::string s = "[";
    for (size_t i = 0; i < idx.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(idx[i]);
    }
    return s + "]";
}

}  // namespace fatou
