#include "fatou/continuation.hpp"

#include <cmath>
#include <numbers>

namespace fatou {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double element_overlap(const MapElement& a, const MapElement& b) {
    return std::min(a.radius, b.radius) - (a.center - b.center).norm();
}

// Deterministic probe points inside the lens of two overlapping balls.
std::vector<CVec> lens_samples(const MapElement& a, const MapElement& b, int count) {
    CVec mid = 0.5 * (a.center + b.center);
    double room = std::min(a.radius - (mid - a.center).norm(), b.radius - (mid - b.center).norm());
    room = std::max(room * 0.5, 0.0);
    std::vector<CVec> out;
    out.push_back(mid);
    Rng rng(0x1e5ce5);
    for (int s = 1; s < count; ++s) out.push_back(mid + rng.ball_point(int(mid.size()), room));
    return out;
}

bool elements_agree(const MapElement& a, const MapElement& b, int samples, double tol) {
    for (const CVec& x : lens_samples(a, b, samples)) {
        CVec va = a.eval(x), vb = b.eval(x);
        if (!is_finite(va) || !is_finite(vb)) return false;
        if ((va - vb).norm() > tol * (1.0 + va.norm())) return false;
    }
    return true;
}

}  // namespace

GermPath continue_along_path(const MapElement& start, const std::vector<CVec>& path,
                             const ContinuationOptions& opt) {
    if (path.empty()) throw PreconditionError("continue_along_path: empty path");
    if ((path.front() - start.center).norm() >= start.radius)
        throw PreconditionError("continue_along_path: path does not start inside the seed element");
    if (!start.family) throw PreconditionError("continue_along_path: element has no family");

    GermPath gp;
    gp.path = path;
    gp.elements.push_back(start);
    gp.start_sheet = start.family->classify(start);

    MapElement cur = start;
    for (size_t seg = 0; seg + 1 < path.size(); ++seg) {
        CVec target = path[seg + 1];
        while ((target - cur.center).norm() > 1e-13 * (1.0 + target.norm())) {
            CVec dir = target - cur.center;
            double remaining = dir.norm();
            double step = std::min({opt.max_step, 0.45 * cur.radius, remaining});
            bool advanced = false;
            while (step >= opt.min_step) {
                CVec c_next = cur.center + dir * (step / remaining);
                MapElement cand = cur.family->recenter(c_next, &cur);
                double overlap = element_overlap(cur, cand);
                if (cand.radius > 0.0 && overlap > 0.0 &&
                    elements_agree(cur, cand, opt.overlap_samples, opt.agreement_tol)) {
                    gp.elements.push_back(cand);
                    cur = cand;
                    advanced = true;
                    break;
                }
                step *= 0.5;
            }
            if (!advanced) {
                gp.obstructed = true;
                gp.obstruction_location = cur.center + dir * (opt.min_step / remaining);
                gp.end_sheet = cur.family->classify(cur);
                return gp;
            }
        }
    }
    gp.end_sheet = cur.family->classify(cur);
    return gp;
}

SheetId monodromy(const MapElement& start, const std::vector<CVec>& loop,
                  const ContinuationOptions& opt) {
    if (loop.size() < 2 || (loop.front() - loop.back()).norm() > 1e-9 * (1.0 + loop.front().norm()))
        throw PreconditionError("monodromy: loop is not closed");
    GermPath gp = continue_along_path(start, loop, opt);
    if (gp.obstructed)
        throw NumericalError("monodromy: continuation obstructed near " +
                             format_point(gp.obstruction_location));
    return start.family->branches.delta(gp.end_sheet, gp.start_sheet);
}

std::vector<RiemannPoint> fiber_enumerate(const HoloMap& h, const RegularityNbhd& r,
                                          const CVec& p, int depth, const SheetPsi& psi,
                                          const SheetClassify& classify, int k_max) {
    // Index boxes per generator: all residues for cyclic, [-depth, depth] for
    // integral generators.
    std::vector<std::vector<int>> ranges;
    for (const auto& g : h.branches.gens) {
        std::vector<int> range;
        if (g.kind == BranchGenerator::Kind::cyclic)
            for (int j = 0; j < g.modulus; ++j) range.push_back(j);
        else
            for (int j = -depth; j <= depth; ++j) range.push_back(j);
        ranges.push_back(range);
    }
    if (ranges.empty()) ranges.push_back({0});

    std::vector<SheetId> sheets;
    std::vector<int> cur(ranges.size(), 0);
    auto emit = [&](auto&& self, size_t g) -> void {
        if (g == ranges.size()) {
            std::vector<int> idx(cur.begin(), cur.end());
            if (h.branches.count() == 0) idx.clear();
            sheets.push_back(SheetId(std::move(idx)));
            return;
        }
        for (int v : ranges[g]) {
            cur[g] = v;
            self(self, g + 1);
        }
    };
    emit(emit, 0);

    std::vector<RiemannPoint> out;
    for (const SheetId& s : sheets) {
        // First pullback on the selected branch, then the principal chain.
        CVec q = pullback_step(h, p, &s);
        if (!is_finite(q)) continue;
        auto m = basin_membership(h, r, q, k_max);
        if (m.status != Membership::member) continue;
        RiemannPoint rp;
        rp.base = p;
        rp.sheet = h.branches.count() ? h.branches.reduce(s) : s;
        rp.level = 1 + *m.level;
        rp.witness = *m.witness;
        rp.psi_value = psi(rp.level, rp.witness);
        if (classify) rp.sheet = classify(p, q);
        out.push_back(rp);
    }
    return out;
}

std::vector<RiemannPoint> lift_path(const HoloMap& h, const RegularityNbhd& r,
                                    const std::vector<CVec>& gamma, const RiemannPoint& start,
                                    const SheetPsi& psi, const SheetClassify& classify,
                                    double continuity_tol) {
    if (gamma.empty()) throw PreconditionError("lift_path: empty path");
    if ((gamma.front() - start.base).norm() > 1e-9 * (1.0 + start.base.norm()))
        throw PreconditionError("lift_path: start point does not project to gamma(0)");

    auto forward_n = [&](const CVec& y, int n) {
        CVec x = y;
        for (int j = 0; j < n; ++j) x = h.forward(x);
        return x;
    };

    std::vector<RiemannPoint> lift{start};
    CVec witness = start.witness;
    int level = start.level;
    CVec prev_psi = start.psi_value;
    CVec base = start.base;

    for (size_t v = 1; v < gamma.size(); ++v) {
        CVec target = gamma[v];
        // Substeps sized to keep Newton in its contraction basin.
        int sub = 1;
        for (;;) {
            CVec w = witness;
            int lv = level;
            bool ok = true;
            for (int s = 1; s <= sub && ok; ++s) {
                CVec p_s = base + (target - base) * (double(s) / sub);
                auto hn = [&](const CVec& y) { return forward_n(y, lv); };
                CVec w_next = lv == 0 ? p_s : newton_inverse(hn, p_s, w, 1e-11);
                if (!is_finite(w_next)) {
                    ok = false;
                    break;
                }
                w = w_next;
                double sn = scaled_norm_at(r, h.fixed_point, w);
                if (sn >= r.rho) {
                    ok = false;  // witness escaped R; retry with smaller steps
                    break;
                }
                if (sn > 0.85 * r.rho) {
                    w = pullback_step(h, w);
                    if (!is_finite(w)) {
                        ok = false;
                        break;
                    }
                    ++lv;
                }
            }
            if (ok) {
                witness = w;
                level = lv;
                break;
            }
            sub *= 2;
            if (sub > 1024)
                throw NumericalError("lift_path: witness tracking failed near " +
                                     format_point(target));
        }
        base = target;
        RiemannPoint rp;
        rp.base = base;
        rp.level = level;
        rp.witness = witness;
        rp.psi_value = psi(level, witness);
        rp.sheet = classify ? classify(base, level >= 1 ? forward_n(witness, level - 1) : witness)
                            : start.sheet;
        if ((rp.psi_value - prev_psi).norm() > continuity_tol * (1.0 + prev_psi.norm()) * 50.0)
            throw NumericalError("lift_path: continuity lost near " + format_point(base));
        prev_psi = rp.psi_value;
        lift.push_back(rp);
    }
    return lift;
}

CompatReport compatibility_check(const RiemannPoint& x1, const RiemannPoint& x2, double tol) {
    CompatReport rep;
    rep.psi_dist = (x1.psi_value - x2.psi_value).norm();
    rep.base_dist = (x1.base - x2.base).norm();
    rep.applicable = rep.psi_dist < tol;
    rep.pass = !rep.applicable || rep.base_dist < 10.0 * tol;
    return rep;
}

// ------------------------------------------------------------ stock families

namespace {

// log(1+x) on C^1.  Elements carry the accumulated branch value at the
// center; re-centering adds the principal log of the cross-ratio, which is
// smooth on any ball avoiding the branch point -1.
MapElement make_log_element(const std::shared_ptr<const GermFamily>& fam, const CVec& c,
                            cdouble value_at_center) {
    MapElement e;
    e.center = c;
    e.radius = 0.85 * std::abs(cdouble(1.0) + c[0]);
    cdouble base = cdouble(1.0) + c[0];
    e.eval = [base, value_at_center](const CVec& x) {
        CVec out(1);
        out[0] = value_at_center + std::log((cdouble(1.0) + x[0]) / base);
        return out;
    };
    e.family = fam;
    return e;
}

MapElement make_root_element(const std::shared_ptr<const GermFamily>& fam, const CVec& c,
                             cdouble value_at_center, int n) {
    MapElement e;
    e.center = c;
    e.radius = 0.85 * std::abs(c[0]);
    cdouble base = c[0];
    e.eval = [base, value_at_center, n](const CVec& x) {
        CVec out(1);
        out[0] = value_at_center * std::exp(std::log(x[0] / base) / double(n));
        return out;
    };
    e.family = fam;
    return e;
}

}  // namespace

std::shared_ptr<const GermFamily> log_family() {
    auto fam = std::make_shared<GermFamily>();
    fam->dim = 1;
    fam->branches.gens.push_back({BranchGenerator::Kind::integral, 0, "log"});
    std::weak_ptr<const GermFamily> self = fam;
    fam->recenter = [self](const CVec& c, const MapElement* prev) {
        auto fam_locked = self.lock();
        cdouble v = prev ? prev->eval(c)[0] : std::log(cdouble(1.0) + c[0]);
        return make_log_element(fam_locked, c, v);
    };
    fam->classify = [](const MapElement& e) {
        cdouble principal = std::log(cdouble(1.0) + e.center[0]);
        cdouble v = e.eval(e.center)[0];
        int k = int(std::lround((v.imag() - principal.imag()) / kTwoPi));
        return SheetId({k});
    };
    return fam;
}

std::shared_ptr<const GermFamily> nth_root_family(int n) {
    auto fam = std::make_shared<GermFamily>();
    fam->dim = 1;
    fam->branches.gens.push_back({BranchGenerator::Kind::cyclic, n, "root" + std::to_string(n)});
    std::weak_ptr<const GermFamily> self = fam;
    fam->recenter = [self, n](const CVec& c, const MapElement* prev) {
        auto fam_locked = self.lock();
        cdouble v = prev ? prev->eval(c)[0] : std::exp(std::log(c[0]) / double(n));
        return make_root_element(fam_locked, c, v, n);
    };
    fam->classify = [n](const MapElement& e) {
        cdouble v = e.eval(e.center)[0];
        double k = (double(n) * std::arg(v) - std::arg(e.center[0])) / kTwoPi;
        int kk = int(std::lround(k));
        return SheetId({((kk % n) + n) % n});
    };
    return fam;
}

MapElement seed_element(const std::shared_ptr<const GermFamily>& family, const CVec& center) {
    return family->recenter(center, nullptr);
}

}  // namespace fatou
