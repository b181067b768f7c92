#include "fatou/examples.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace fatou {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cdouble nth_root_branch(cdouble z, int j, int n) {
    return std::exp((std::log(z) + cdouble(0.0, kTwoPi * j)) / double(n));
}

CVec vec2(cdouble a, cdouble b) {
    CVec v(2);
    v[0] = a;
    v[1] = b;
    return v;
}

CVec vec1(cdouble a) {
    CVec v(1);
    v[0] = a;
    return v;
}

// ------------------------------------------------------------ carrier access

struct Carrier {
    std::shared_ptr<const FBPipeline> pipe;
    CMatrix frame;  // unitary frame of the carrier chart

    CVec chi(const CVec& w) const {  // tangent to id at 0, image = basin
        ThetaEvaluator th(pipe);
        return pipe->from_local(th.theta(frame.adjoint() * w));
    }
    CVec chi_inv(const CVec& p) const {  // defined on the basin only
        FBMapEvaluator ev(pipe);
        return frame * ev.psi_global(p, 200);
    }
    PolyMap chi_germ(int trunc) const {  // Taylor at 0
        return conjugate_by_unitary(pipe->T_inv.truncated(trunc), frame.adjoint(), trunc);
    }
    PolyMap chi_germ_at(const CVec& w0, int trunc) const {
        PolyMap tg = theta_germ_at(*pipe, frame.adjoint() * w0, trunc);
        return conjugate_by_unitary(tg, frame.adjoint(), trunc);
    }
};

const Carrier& carrier() {
    static std::mutex mu;
    static std::shared_ptr<Carrier> cached;
    std::lock_guard<std::mutex> lock(mu);
    if (!cached) {
        HoloMap h = make_quadratic_basin_map(0.1, 0.06, 0.01, "carrier", 10);
        PipelineOptions opts;
        opts.m = 10;
        auto pipe = build_pipeline(h, opts);
        cached = std::make_shared<Carrier>(Carrier{pipe, pipe->R.frame});
    }
    return *cached;
}

// error-signaling vector for inverse branches with no reachable preimage
CVec nanvec(int n) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = cdouble(std::nan(""), 0.0);
    return v;
}

// ----------------------------------------------------------------- exp germ

// (exp(u) - 1, v) truncated: exact series coefficients.
PolyMap exp_minus_one_germ(int trunc) {
    CPoly first(2, trunc);
    double fact = 1.0;
    for (int j = 1; j <= trunc; ++j) {
        fact *= j;
        MultiIndex mi = MultiIndex::zeros(2);
        mi.e[0] = j;
        first.add_term(mi, 1.0 / fact);
    }
    CPoly second = CPoly::variable(2, 1, trunc);
    return PolyMap({first, second}, trunc);
}

// --------------------------------------------------------------- specs

ExampleSpec spec_koenigs1d() {
    ExampleSpec s;
    s.name = "koenigs1d";
    s.dim = 1;
    int trunc = 12;
    // F(z) = z/2 + z^2; h is its principal inverse branch.
    CPoly f0(1, trunc);
    f0.add_term(MultiIndex({{1}}), 0.5);
    f0.add_term(MultiIndex({{2}}), 1.0);
    PolyMap f_poly({f0}, trunc);

    HoloMap h;
    h.dim = 1;
    h.name = s.name;
    h.fixed_point = CVec::Zero(1);
    h.germ = map_inverse_formal(f_poly, trunc);
    h.forward = [](const CVec& p) {
        return vec1((std::sqrt(cdouble(1.0) + 16.0 * p[0]) - 1.0) / 4.0);
    };
    h.inverse_branch = [](const CVec& p, const SheetId&) {
        return vec1(0.5 * p[0] + p[0] * p[0]);
    };
    s.map = h;
    s.opts.m = 8;
    s.expected = {"pd-residual", "contraction", "psi-convergence", "theta-roundtrip",
                  "theta-image"};
    s.default_slice = {vec1(0.0), vec1(1.0), vec1(cdouble(0, 1)), -1.2, 0.8, -1.0, 1.0, 256};
    return s;
}

ExampleSpec spec_resonant2d() {
    ExampleSpec s;
    s.name = "resonant2d";
    s.dim = 2;
    int trunc = 10;
    HoloMap h;
    h.dim = 2;
    h.name = s.name;
    h.fixed_point = CVec::Zero(2);
    // F = (z1/2, z2/4 + z1^2); h = F^{-1} = (2 w1, 4 w2 - 16 w1^2).
    CPoly h0(2, trunc), h1(2, trunc);
    h0.add_term(MultiIndex({{1, 0}}), 2.0);
    h1.add_term(MultiIndex({{0, 1}}), 4.0);
    h1.add_term(MultiIndex({{2, 0}}), -16.0);
    h.germ = PolyMap({h0, h1}, trunc);
    h.forward = [](const CVec& p) { return vec2(2.0 * p[0], 4.0 * p[1] - 16.0 * p[0] * p[0]); };
    h.inverse_branch = [](const CVec& p, const SheetId&) {
        return vec2(0.5 * p[0], 0.25 * p[1] + p[0] * p[0]);
    };
    s.map = h;
    s.opts.m = 6;
    s.expected = {"pd-residual", "resonance-ledger", "contraction", "degree-bound",
                  "theta-roundtrip"};
    s.default_slice = {vec2(0, 0), vec2(1, 0), vec2(0, 1), -2, 2, -2, 2, 128};
    return s;
}

ExampleSpec spec_henon_fb() {
    ExampleSpec s;
    s.name = "henon_fb";
    s.dim = 2;
    s.map = make_quadratic_basin_map(0.1, 0.06, 0.25, s.name);
    s.opts.m = 8;
    s.expected = {"pd-residual", "contraction", "psi-convergence", "theta-roundtrip",
                  "theta-image", "basin-proper"};
    s.default_slice = {vec2(0, 0), vec2(1, 0), vec2(0, 1), -3, 3, -3, 3, 128};
    return s;
}

ExampleSpec spec_exp_regular() {
    ExampleSpec s;
    s.name = "exp_regular";
    s.dim = 2;
    const Carrier& c = carrier();
    int trunc = 8;

    HoloMap h;
    h.dim = 2;
    h.name = s.name;
    h.fixed_point = CVec::Zero(2);
    h.branches.gens.push_back({BranchGenerator::Kind::integral, 0, "log"});
    // h = E o (2 chi), E(u, v) = (exp(u) - 1, v); image avoids {first = -1}.
    h.forward = [&c](const CVec& p) {
        CVec y = 2.0 * c.chi(p);
        return vec2(std::exp(y[0]) - 1.0, y[1]);
    };
    h.inverse_branch = [&c](const CVec& p, const SheetId& sheet) {
        if (p[0] == cdouble(-1.0, 0.0)) return nanvec(2);
        int k = sheet.idx.empty() ? 0 : sheet.idx[0];
        cdouble u = std::log(cdouble(1.0) + p[0]) + cdouble(0.0, kTwoPi * k);
        try {
            return c.chi_inv(vec2(0.5 * u, 0.5 * p[1]));
        } catch (const std::exception&) {
            return nanvec(2);
        }
    };
    h.germ = map_compose(exp_minus_one_germ(trunc), map_scale(c.chi_germ(trunc), 2.0), trunc);
    s.map = h;
    s.opts.m = 8;

    s.sheet_classify = [&c](const CVec& p, const CVec& q) {
        cdouble u = 2.0 * c.chi(q)[0];
        cdouble principal = std::log(cdouble(1.0) + p[0]);
        int k = int(std::lround((u.imag() - principal.imag()) / kTwoPi));
        return SheetId({k});
    };

    s.inverse_family = [&c]() {
        auto fam = std::make_shared<GermFamily>();
        fam->dim = 2;
        fam->branches.gens.push_back({BranchGenerator::Kind::integral, 0, "log"});
        std::weak_ptr<const GermFamily> self = fam;
        fam->recenter = [self, &c](const CVec& center, const MapElement* prev) {
            auto locked = self.lock();
            cdouble u_c = prev ? 2.0 * c.chi(prev->eval(center))[0]
                               : std::log(cdouble(1.0) + center[0]);
            cdouble base = cdouble(1.0) + center[0];
            MapElement e;
            e.center = center;
            e.radius = std::min(0.8 * std::abs(base), 0.75);
            e.family = locked;
            e.eval = [u_c, base, &c](const CVec& x) {
                cdouble u = u_c + std::log((cdouble(1.0) + x[0]) / base);
                try {
                    return c.chi_inv(vec2(0.5 * u, 0.5 * x[1]));
                } catch (const std::exception&) {
                    return nanvec(2);
                }
            };
            return e;
        };
        fam->classify = [&c](const MapElement& e) {
            cdouble u = 2.0 * c.chi(e.eval(e.center))[0];
            cdouble principal = std::log(cdouble(1.0) + e.center[0]);
            return SheetId({int(std::lround((u.imag() - principal.imag()) / kTwoPi))});
        };
        return std::static_pointer_cast<const GermFamily>(fam);
    };

    s.branch_loop = [](int turns, int segments) {
        // Circle of radius 1/2 around the branch line {p1 = -1} at p2 = 0.1.
        std::vector<CVec> loop;
        int total = std::abs(turns) * segments;
        for (int i = 0; i <= total; ++i) {
            double t = kTwoPi * turns * double(i) / total;
            loop.push_back(vec2(cdouble(-1.0, 0.0) + 0.5 * std::exp(cdouble(0.0, t)),
                                cdouble(0.1, 0.0)));
        }
        return loop;
    };

    s.expected = {"contraction", "basin-proper", "log-monodromy", "sheet-compat"};
    s.default_slice = {vec2(0, 0.1), vec2(1, 0), vec2(cdouble(0, 1), 0), -2.5, 1.5, -2.0, 2.0, 256};
    return s;
}

struct PowerCoverParams {
    cdouble a, b;
    double s;
    int n;
    int j_star;
    CMatrix dchi11;
};

PowerCoverParams power_params(int n) {
    const Carrier& c = carrier();
    CVec p = c.chi(vec2(1.0, 1.0));
    PowerCoverParams pp;
    pp.a = p[0];
    pp.b = p[1];
    pp.n = n;
    pp.dchi11 = c.chi_germ_at(vec2(1.0, 1.0), 2).linear_part();
    CMatrix scale = CMatrix::Zero(2, 2);
    scale(0, 0) = double(n);
    scale(1, 1) = 1.0;
    auto evs = eigenvalues(pp.dchi11 * scale);
    double min_mod = std::abs(evs.front());
    pp.s = 2.2 / min_mod;
    // Principal-branch offset putting the fixed point on the default sheet.
    cdouble an = std::pow(pp.a, n);
    pp.j_star = 0;
    double best = 1e300;
    for (int j = 0; j < n; ++j) {
        double d = std::abs(nth_root_branch(an, j, n) - pp.a);
        if (d < best) {
            best = d;
            pp.j_star = j;
        }
    }
    return pp;
}

ExampleSpec spec_power_cover(int n) {
    ExampleSpec s;
    s.name = n == 3 ? "power_cover" : "power_cover" + std::to_string(n);
    s.dim = 2;
    const Carrier& c = carrier();
    PowerCoverParams pp = power_params(n);
    const cdouble a = pp.a, b = pp.b;
    const double sc = pp.s;
    const int jstar = pp.j_star;
    const cdouble a_pow = std::pow(a, n - 1);

    HoloMap h;
    h.dim = 2;
    h.name = s.name;
    h.fixed_point = vec2(a, b);
    h.branches.gens.push_back({BranchGenerator::Kind::cyclic, n, "root"});

    // h(p) = H(a^{1-n} p1^n, p2) with H(z, w) = chi(s(z - a) + 1, s(w - b) + 1).
    h.forward = [&c, a, b, sc, n](const CVec& p) {
        cdouble z = std::pow(p[0], n) / std::pow(a, n - 1);
        return c.chi(vec2(sc * (z - a) + 1.0, sc * (p[1] - b) + 1.0));
    };
    h.inverse_branch = [&c, a, b, sc, n, jstar, a_pow](const CVec& p, const SheetId& sheet) {
        int j = sheet.idx.empty() ? 0 : sheet.idx[0];
        CVec uv;
        try {
            uv = c.chi_inv(p);
        } catch (const std::exception&) {
            return nanvec(2);
        }
        cdouble z = a + (uv[0] - 1.0) / sc;
        cdouble zeta = a_pow * z;
        if (zeta == cdouble(0.0)) return vec2(0.0, b + (uv[1] - 1.0) / sc);
        return vec2(nth_root_branch(zeta, jstar + j, n), b + (uv[1] - 1.0) / sc);
    };

    // Germ at the fixed point: chi germ at (1,1) composed with the local
    // power factor, all exact shifted polynomials.
    {
        int trunc = 6;
        PolyMap chi11 = c.chi_germ_at(vec2(1.0, 1.0), trunc);
        // inner(x) = s * (pw(P + x) - pw(P)), pw(z, w) = (a^{1-n} z^n, w)
        CPoly inner0(2, trunc), inner1(2, trunc);
        {
            // a^{1-n} ((a + x1)^n - a^n) expanded binomially.
            cdouble coeff = 1.0 / a_pow;
            cdouble binom = 1.0;
            for (int k = 1; k <= n && k <= trunc; ++k) {
                binom = binom * double(n - k + 1) / double(k);
                MultiIndex mi = MultiIndex::zeros(2);
                mi.e[0] = k;
                inner0.add_term(mi, coeff * binom * std::pow(a, n - k));
            }
            inner1.add_term(MultiIndex({{0, 1}}), 1.0);
        }
        PolyMap inner({inner0, inner1}, trunc);
        h.germ = map_compose(chi11, map_scale(inner, sc), trunc);
    }
    s.map = h;
    s.opts.m = 6;

    auto zeta_of = [&c, a, sc, a_pow](const CVec& p) -> cdouble {
        CVec uv = c.chi_inv(p);
        return a_pow * (a + (uv[0] - 1.0) / sc);
    };

    s.sheet_classify = [zeta_of, n, jstar](const CVec& p, const CVec& q) {
        cdouble zeta = zeta_of(p);
        double jraw = (double(n) * std::arg(q[0]) - std::arg(zeta)) / kTwoPi;
        int j = int(std::lround(jraw)) - jstar;
        return SheetId({((j % n) + n) % n});
    };

    s.inverse_family = [&c, zeta_of, a, b, sc, n, jstar]() {
        auto fam = std::make_shared<GermFamily>();
        fam->dim = 2;
        fam->branches.gens.push_back({BranchGenerator::Kind::cyclic, n, "root"});
        std::weak_ptr<const GermFamily> self = fam;
        fam->recenter = [self, &c, zeta_of, b, sc, n, jstar](const CVec& center,
                                                             const MapElement* prev) {
            auto locked = self.lock();
            MapElement e;
            e.center = center;
            e.family = locked;
            cdouble zeta_c;
            try {
                zeta_c = zeta_of(center);
            } catch (const std::exception&) {
                e.radius = 0.0;
                return e;
            }
            cdouble rt_c = prev ? prev->eval(center)[0] : nth_root_branch(zeta_c, jstar, n);
            // Conservative radius from the local sensitivity of zeta.
            double dz = 0.0;
            for (int k = 0; k < 2; ++k) {
                try {
                    CVec cp = center;
                    cp[k] += 1e-4;
                    dz = std::max(dz, std::abs(zeta_of(cp) - zeta_c) / 1e-4);
                } catch (const std::exception&) {
                    dz = 1e6;
                }
            }
            e.radius = std::min(0.35 * std::abs(zeta_c) / std::max(dz, 1e-9), 0.5);
            e.eval = [&c, zeta_of, zeta_c, rt_c, b, sc, n](const CVec& x) {
                try {
                    CVec uv = c.chi_inv(x);
                    cdouble zeta = zeta_of(x);
                    cdouble rt = rt_c * std::exp(std::log(zeta / zeta_c) / double(n));
                    return vec2(rt, b + (uv[1] - 1.0) / sc);
                } catch (const std::exception&) {
                    return nanvec(2);
                }
            };
            return e;
        };
        fam->classify = [zeta_of, n, jstar](const MapElement& e) {
            cdouble zeta = zeta_of(e.center);
            cdouble rt = e.eval(e.center)[0];
            double jraw = (double(n) * std::arg(rt) - std::arg(zeta)) / kTwoPi;
            int j = int(std::lround(jraw)) - jstar;
            return SheetId({((j % n) + n) % n});
        };
        return std::static_pointer_cast<const GermFamily>(fam);
    };

    s.branch_loop = [&c, a, sc, n](int turns, int segments) {
        // Image under chi of a circle in the (u, v) chart whose z-coordinate
        // winds around the root branch locus zeta = 0.
        std::vector<CVec> loop;
        int total = std::abs(turns) * segments;
        double r = 0.4 * std::abs(a);
        for (int i = 0; i <= total; ++i) {
            double t = kTwoPi * turns * double(i) / total;
            cdouble z = r * std::exp(cdouble(0.0, t)) / std::pow(a, n - 1);
            cdouble u = 1.0 + sc * (z - a);
            loop.push_back(c.chi(vec2(u, 1.0)));
        }
        return loop;
    };

    s.expected = {"contraction", "sheets-n", "root-monodromy", "sheet-compat"};
    s.default_slice = {vec2(0, b), vec2(1, 0), vec2(cdouble(0, 1), 0), -2, 2, -2, 2, 128};
    return s;
}

}  // namespace

HoloMap make_quadratic_basin_map(double a, double b, double eta, const std::string& name,
                                 int germ_trunc) {
    HoloMap h;
    h.dim = 2;
    h.name = name;
    h.fixed_point = CVec::Zero(2);
    // Attracting automorphism f(x, y) = (a x + b y + eta x^2, x); presented
    // map is the repelling inverse h = f^{-1}.
    h.forward = [a, b, eta](const CVec& p) {
        return vec2(p[1], (p[0] - a * p[1] - eta * p[1] * p[1]) / b);
    };
    h.inverse_branch = [a, b, eta](const CVec& p, const SheetId&) {
        return vec2(a * p[0] + b * p[1] + eta * p[0] * p[0], p[0]);
    };
    CPoly h0(2, germ_trunc), h1(2, germ_trunc);
    h0.add_term(MultiIndex({{0, 1}}), 1.0);
    h1.add_term(MultiIndex({{1, 0}}), 1.0 / b);
    h1.add_term(MultiIndex({{0, 1}}), -a / b);
    h1.add_term(MultiIndex({{0, 2}}), -eta / b);
    h.germ = PolyMap({h0, h1}, germ_trunc);
    return h;
}

std::vector<std::string> example_names() {
    return {"koenigs1d", "resonant2d", "henon_fb", "exp_regular", "power_cover"};
}

ExampleSpec get_example(const std::string& name) {
    if (name == "koenigs1d") return spec_koenigs1d();
    if (name == "resonant2d") return spec_resonant2d();
    if (name == "henon_fb") return spec_henon_fb();
    if (name == "exp_regular") return spec_exp_regular();
    if (name == "power_cover") return spec_power_cover(3);
    if (name.rfind("power_cover", 0) == 0) {
        int n = std::stoi(name.substr(std::string("power_cover").size()));
        if (n < 2 || n > 8) throw PreconditionError("power_cover: n out of range");
        return spec_power_cover(n);
    }
    throw PreconditionError("unknown example: " + name);
}

std::shared_ptr<const FBPipeline> example_pipeline(const std::string& name) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const FBPipeline>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    ExampleSpec spec = get_example(name);
    auto pipe = build_pipeline(spec.map, spec.opts);
    cache[name] = pipe;
    return pipe;
}

// ------------------------------------------------------------ verify_example

namespace {

void check_germ_match(const ExampleSpec& spec, Report& rep) {
    // Truncated germ against central differences of the evaluator, order 2.
    const HoloMap& h = spec.map;
    double step = 1e-5;
    double worst = 0.0;
    CompiledMap germ(h.germ);
    Rng rng(0xfd17);
    for (int trial = 0; trial < 8; ++trial) {
        CVec d = rng.sphere_point(h.dim, 1.0);
        auto sample = [&](double t) {
            return h.forward(h.fixed_point + t * d) - h.fixed_point;
        };
        auto sample_germ = [&](double t) { return germ.eval(CVec(t * d)); };
        // First and second directional derivatives.
        CVec d1 = (sample(step) - sample(-step)) / (2 * step);
        CVec d1g = (sample_germ(step) - sample_germ(-step)) / (2 * step);
        CVec d2 = (sample(step) - 2.0 * sample(0.0) + sample(-step)) / (step * step);
        CVec d2g = (sample_germ(step) - 2.0 * sample_germ(0.0) + sample_germ(-step)) / (step * step);
        worst = std::max(worst, (d1 - d1g).norm());
        worst = std::max(worst, (d2 - d2g).norm() * step);  // same scale as order-1 error
    }
    rep.add_bound(spec.name + ".germ-match", worst, 1e-6);
}

}  // namespace

Report verify_example(const ExampleSpec& spec) {
    Report rep;
    auto pipe = example_pipeline(spec.name);
    FBMapEvaluator psi(pipe);
    ThetaEvaluator theta(pipe);

    check_germ_match(spec, rep);
    rep.add_bound(spec.name + ".fixed-point", (spec.map.forward(spec.map.fixed_point) -
                                               spec.map.fixed_point).norm(), 1e-12);

    for (const std::string& flag : spec.expected) {
        if (flag == "pd-residual") {
            double r = check_residual(pipe->nf, pipe->F_germ.truncated(pipe->opts.m - 1));
            rep.add_bound(spec.name + ".pd-residual", r, 1e-10);
        } else if (flag == "resonance-ledger") {
            bool one = pipe->nf.resonances.size() == 1;
            bool right = one && pipe->nf.resonances[0].component == 1 &&
                         pipe->nf.resonances[0].alpha == MultiIndex({{2, 0}});
            rep.add(spec.name + ".resonance-ledger", right, double(pipe->nf.resonances.size()),
                    1.0);
        } else if (flag == "contraction") {
            // Re-sample the certified contraction at fresh points.
            Rng rng(0xc0417ac7);
            double worst = 0.0;
            for (int s = 0; s < 200; ++s) {
                CVec u = rng.sphere_point(spec.dim, pipe->R.rho);
                CVec x = pipe->from_local(pipe->R.scaling * u);
                CVec fx = pullback_step(spec.map, x);
                if (!is_finite(fx)) {
                    worst = std::numeric_limits<double>::infinity();
                    break;
                }
                double sn = scaled_norm_at(pipe->R, spec.map.fixed_point, fx);
                worst = std::max(worst, sn / (pipe->R.alpha * pipe->R.rho));
            }
            rep.add_bound(spec.name + ".contraction", worst, 1.0);
        } else if (flag == "degree-bound") {
            PolyMap gk = pipe->nf.G;
            int maxdeg = gk.degree(1e-12);
            bool stable = true;
            for (int k = 2; k <= 20; ++k) {
                gk = map_compose(pipe->nf.G, gk, 8);
                if (gk.degree(1e-12) != maxdeg) stable = false;
            }
            rep.add(spec.name + ".degree-bound", stable, double(maxdeg), double(maxdeg));
        } else if (flag == "psi-convergence") {
            Rng rng(0x951c0);
            double worst_resid = 0.0;
            for (int s = 0; s < 25; ++s) {
                CVec u = rng.ball_point(spec.dim, 0.9 * pipe->R.rho);
                CVec z = pipe->from_local(pipe->R.scaling * u);
                CVec pz = psi.psi(z);
                CVec fz = pipe->from_local(pipe->f_local(pipe->to_local(z)));
                worst_resid = std::max(worst_resid, (psi.psi(fz) - pipe->cG.eval(pz)).norm());
            }
            rep.add_bound(spec.name + ".psi-conjugacy", worst_resid, 1e-8);
        } else if (flag == "theta-roundtrip") {
            Rng rng(0x7e7a);
            double worst = 0.0;
            for (int s = 0; s < 25; ++s) {
                CVec u = rng.ball_point(spec.dim, 0.25 * pipe->R.rho);
                CVec z = pipe->from_local(pipe->R.scaling * u);
                worst = std::max(worst, (theta.theta(psi.psi(z)) - pipe->to_local(z)).norm());
            }
            rep.add_bound(spec.name + ".theta-roundtrip", worst, 1e-6);
        } else if (flag == "theta-image") {
            Rng rng(0x7e7b);
            int members = 0, tries = 25;
            for (int s = 0; s < tries; ++s) {
                CVec w = rng.ball_point(spec.dim, 1.0);
                CVec p = pipe->from_local(theta.theta(w));
                auto m = basin_membership(spec.map, pipe->R, p, 200);
                if (m.status == Membership::member) ++members;
            }
            rep.add(spec.name + ".theta-image", members == tries, double(members), double(tries));
        } else if (flag == "basin-proper") {
            int excluded = 0, tries = 50;
            if (spec.name == "exp_regular") {
                Rng rng(0xbad5eed);
                for (int s = 0; s < tries; ++s) {
                    CVec p = vec2(cdouble(-1.0, 0.0), cdouble(rng.uniform(-2, 2), rng.uniform(-2, 2)));
                    auto m = basin_membership(spec.map, pipe->R, p, 60);
                    if (m.status == Membership::non_member) ++excluded;
                }
            } else {
                // Far points of a quadratic basin escape.
                Rng rng(0xbad5eee);
                for (int s = 0; s < tries; ++s) {
                    CVec p = vec2(cdouble(50.0 + rng.uniform(), rng.uniform()), cdouble(0, 0));
                    auto m = basin_membership(spec.map, pipe->R, p, 60);
                    if (m.status == Membership::non_member) ++excluded;
                }
            }
            rep.add(spec.name + ".basin-proper", excluded == tries, double(excluded),
                    double(tries));
        } else if (flag == "log-monodromy") {
            auto fam = spec.inverse_family();
            auto loop = spec.branch_loop(1, 48);
            MapElement seed = fam->recenter(loop.front(), nullptr);
            SheetId delta = monodromy(seed, loop);
            rep.add(spec.name + ".log-monodromy", delta == SheetId({1}), double(delta.idx[0]),
                    1.0);
        } else if (flag == "root-monodromy") {
            auto fam = spec.inverse_family();
            auto loop = spec.branch_loop(1, 48);
            MapElement seed = fam->recenter(loop.front(), nullptr);
            SheetId delta = monodromy(seed, loop);
            rep.add(spec.name + ".root-monodromy", delta == SheetId({1}), double(delta.idx[0]),
                    1.0);
        } else if (flag == "sheets-n") {
            int n = spec.map.branches.gens[0].modulus;
            // A guaranteed basin point: push a neighborhood point forward.
            CVec x = spec.map.fixed_point;
            CVec u = CVec::Zero(spec.dim);
            u[0] = 0.3 * pipe->R.rho;
            x = pipe->from_local(pipe->R.scaling * u);
            for (int j = 0; j < 3; ++j) x = spec.map.forward(x);
            auto fiber = fiber_enumerate(spec.map, pipe->R, x, 1, make_sheet_psi(pipe),
                                         spec.sheet_classify, 200);
            bool distinct = true;
            for (size_t i = 0; i < fiber.size(); ++i)
                for (size_t j = i + 1; j < fiber.size(); ++j)
                    if ((fiber[i].psi_value - fiber[j].psi_value).norm() < 1e-6) distinct = false;
            rep.add(spec.name + ".sheets-n", int(fiber.size()) == n && distinct,
                    double(fiber.size()), double(n));
        } else if (flag == "sheet-compat") {
            // Compatibility over fibers at sampled basin points.
            Rng rng(0x5ee7);
            bool ok = true;
            int pairs = 0;
            for (int s = 0; s < 8; ++s) {
                CVec u = rng.ball_point(spec.dim, 0.4 * pipe->R.rho);
                CVec x = pipe->from_local(pipe->R.scaling * u);
                for (int j = 0; j < 2; ++j) x = spec.map.forward(x);
                std::vector<RiemannPoint> fiber;
                try {
                    fiber = fiber_enumerate(spec.map, pipe->R, x, 2, make_sheet_psi(pipe),
                                            spec.sheet_classify, 200);
                } catch (const std::exception&) {
                    continue;
                }
                for (size_t i = 0; i < fiber.size(); ++i)
                    for (size_t j = i; j < fiber.size(); ++j) {
                        auto cr = compatibility_check(fiber[i], fiber[j], 1e-9);
                        ok = ok && cr.pass;
                        ++pairs;
                    }
            }
            rep.add(spec.name + ".sheet-compat", ok && pairs > 0, double(pairs), 0.0);
        }
    }
    return rep;
}

}  // namespace fatou
