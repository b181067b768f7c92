#include "fatou/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fatou {

// ---------------------------------------------------------------- MultiIndex

MultiIndex MultiIndex::unit(int n, int var) {
    MultiIndex mi = zeros(n);
    mi.e[var] = 1;
    return mi;
}

int MultiIndex::degree() const {
    int d = 0;
    for (int x : e) d += x;
    return d;
}

bool GradedLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return std::lexicographical_compare(a.e.begin(), a.e.end(), b.e.begin(), b.e.end());
}

std::vector<MultiIndex> multi_indices_of_degree(int dim, int degree) {
    std::vector<MultiIndex> out;
    std::vector<int> cur(dim, 0);
    // Recursive enumeration, lexicographic in the exponent vector.
    auto rec = [&](auto&& self, int var, int remaining) -> void {
        if (var == dim - 1) {
            cur[var] = remaining;
            out.push_back(MultiIndex(cur));
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            cur[var] = k;
            self(self, var + 1, remaining - k);
        }
        cur[var] = 0;
    };
    if (dim >= 1) rec(rec, 0, degree);
    return out;
}

// --------------------------------------------------------------------- CPoly

CPoly CPoly::constant(int dim, cdouble c, int max_degree) {
    CPoly p(dim, max_degree);
    p.add_term(MultiIndex::zeros(dim), c);
    return p;
}

CPoly CPoly::variable(int dim, int var, int max_degree) {
    CPoly p(dim, max_degree);
    p.add_term(MultiIndex::unit(dim, var), 1.0);
    return p;
}

CPoly CPoly::monomial(int dim, const MultiIndex& mi, cdouble c, int max_degree) {
    CPoly p(dim, max_degree);
    p.add_term(mi, c);
    return p;
}

cdouble CPoly::coeff(const MultiIndex& mi) const {
    auto it = terms_.find(mi);
    return it == terms_.end() ? cdouble(0.0) : it->second;
}

void CPoly::add_term(const MultiIndex& mi, cdouble c) {
    if (c == cdouble(0.0)) return;
    if (mi.dim() != dim_) throw PreconditionError("poly term dimension mismatch");
    if (mi.degree() > max_degree_) return;
    auto [it, inserted] = terms_.emplace(mi, c);
    if (!inserted) {
        it->second += c;
        if (it->second == cdouble(0.0)) terms_.erase(it);
    }
}

void CPoly::set_coeff(const MultiIndex& mi, cdouble c) {
    if (mi.dim() != dim_) throw PreconditionError("poly term dimension mismatch");
    if (c == cdouble(0.0)) {
        terms_.erase(mi);
        return;
    }
    if (mi.degree() > max_degree_) return;
    terms_[mi] = c;
}

int CPoly::degree(double tol) const {
    int d = -1;
    for (const auto& [mi, c] : terms_)
        if (std::abs(c) > tol) d = std::max(d, mi.degree());
    return d;
}

double CPoly::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [mi, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

CPoly CPoly::truncated(int deg) const {
    CPoly out(dim_, std::min(deg, max_degree_));
    for (const auto& [mi, c] : terms_)
        if (mi.degree() <= deg) out.add_term(mi, c);
    return out;
}

CPoly CPoly::homogeneous_part(int deg) const {
    CPoly out(dim_, max_degree_);
    for (const auto& [mi, c] : terms_)
        if (mi.degree() == deg) out.add_term(mi, c);
    return out;
}

void CPoly::prune_below(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) < tol)
            it = terms_.erase(it);
        else
            ++it;
    }
}

CPoly& CPoly::operator*=(cdouble s) {
    if (s == cdouble(0.0)) {
        terms_.clear();
        return *this;
    }
    for (auto& [mi, c] : terms_) c *= s;
    return *this;
}

CPoly poly_add(const CPoly& a, const CPoly& b) {
    if (a.dim() != b.dim()) throw PreconditionError("poly_add: dimension mismatch");
    CPoly out(a.dim(), std::max(a.max_degree(), b.max_degree()));
    for (const auto& [mi, c] : a.terms()) out.add_term(mi, c);
    for (const auto& [mi, c] : b.terms()) out.add_term(mi, c);
    return out;
}

CPoly poly_sub(const CPoly& a, const CPoly& b) { return poly_add(a, poly_scale(b, -1.0)); }

CPoly poly_scale(const CPoly& a, cdouble s) {
    CPoly out = a;
    out *= s;
    return out;
}

CPoly poly_mul(const CPoly& a, const CPoly& b, int trunc) {
    if (a.dim() != b.dim()) throw PreconditionError("poly_mul: dimension mismatch");
    CPoly out(a.dim(), trunc);
    for (const auto& [ma, ca] : a.terms()) {
        int da = ma.degree();
        if (da > trunc) continue;
        for (const auto& [mb, cb] : b.terms()) {
            if (da + mb.degree() > trunc) continue;
            MultiIndex mi = ma;
            for (int j = 0; j < mi.dim(); ++j) mi.e[j] += mb.e[j];
            out.add_term(mi, ca * cb);
        }
    }
    return out;
}

cdouble CPoly::eval(const CVec& z) const {
    if (z.size() != dim_) throw PreconditionError("poly eval: point dimension mismatch");
    // Powers table per variable, then term products.
    std::vector<std::vector<cdouble>> pw(dim_);
    for (int j = 0; j < dim_; ++j) pw[j].push_back(1.0);
    cdouble acc = 0.0;
    for (const auto& [mi, c] : terms_) {
        cdouble t = c;
        for (int j = 0; j < dim_; ++j) {
            while (int(pw[j].size()) <= mi.e[j]) pw[j].push_back(pw[j].back() * z[j]);
            if (mi.e[j] > 0) t *= pw[j][mi.e[j]];
        }
        acc += t;
    }
    return acc;
}

// ------------------------------------------------------------------- PolyMap

PolyMap::PolyMap(std::vector<CPoly> comps, int trunc) : comps_(std::move(comps)), trunc_(trunc) {
    if (comps_.empty()) throw PreconditionError("PolyMap: no components");
    for (const auto& c : comps_)
        if (c.dim() != int(comps_.size()))
            throw PreconditionError("PolyMap: components must form a self-map of C^N");
}

PolyMap PolyMap::identity(int n, int trunc) {
    std::vector<CPoly> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i) comps.push_back(CPoly::variable(n, i, trunc));
    return PolyMap(std::move(comps), trunc);
}

PolyMap PolyMap::zero(int n, int trunc) {
    std::vector<CPoly> comps(n, CPoly(n, trunc));
    return PolyMap(std::move(comps), trunc);
}

PolyMap PolyMap::from_linear(const CMatrix& a, int trunc) {
    int n = int(a.rows());
    if (a.cols() != n) throw PreconditionError("from_linear: matrix not square");
    std::vector<CPoly> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i) {
        CPoly p(n, trunc);
        for (int j = 0; j < n; ++j) p.add_term(MultiIndex::unit(n, j), a(i, j));
        comps.push_back(std::move(p));
    }
    return PolyMap(std::move(comps), trunc);
}

CMatrix PolyMap::linear_part() const {
    int n = dim();
    CMatrix a = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = comps_[i].coeff(MultiIndex::unit(n, j));
    return a;
}

CVec PolyMap::constant_part() const {
    int n = dim();
    CVec c(n);
    for (int i = 0; i < n; ++i) c[i] = comps_[i].coeff(MultiIndex::zeros(n));
    return c;
}

bool PolyMap::has_zero_constant() const { return constant_part().norm() == 0.0; }

int PolyMap::degree(double tol) const {
    int d = -1;
    for (const auto& c : comps_) d = std::max(d, c.degree(tol));
    return d;
}

double PolyMap::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : comps_) m = std::max(m, c.max_abs_coeff());
    return m;
}

PolyMap PolyMap::truncated(int deg) const {
    std::vector<CPoly> comps;
    comps.reserve(dim());
    for (const auto& c : comps_) comps.push_back(c.truncated(deg));
    return PolyMap(std::move(comps), std::min(deg, trunc_));
}

PolyMap PolyMap::homogeneous_part(int deg) const {
    std::vector<CPoly> comps;
    comps.reserve(dim());
    for (const auto& c : comps_) comps.push_back(c.homogeneous_part(deg));
    return PolyMap(std::move(comps), trunc_);
}

void PolyMap::prune_below(double tol) {
    for (auto& c : comps_) c.prune_below(tol);
}

CVec PolyMap::eval(const CVec& z) const { return CompiledMap(*this).eval(z); }

CVec map_eval(const PolyMap& m, const CVec& z) { return m.eval(z); }

PolyMap map_add(const PolyMap& a, const PolyMap& b) {
    if (a.dim() != b.dim()) throw PreconditionError("map_add: dimension mismatch");
    std::vector<CPoly> comps;
    for (int i = 0; i < a.dim(); ++i) comps.push_back(poly_add(a.comp(i), b.comp(i)));
    return PolyMap(std::move(comps), std::max(a.trunc(), b.trunc()));
}

PolyMap map_sub(const PolyMap& a, const PolyMap& b) { return map_add(a, map_scale(b, -1.0)); }

PolyMap map_scale(const PolyMap& a, cdouble s) {
    std::vector<CPoly> comps;
    for (int i = 0; i < a.dim(); ++i) comps.push_back(poly_scale(a.comp(i), s));
    return PolyMap(std::move(comps), a.trunc());
}

PolyMap map_compose(const PolyMap& outer, const PolyMap& inner, int trunc) {
    if (outer.dim() != inner.dim())
        throw PreconditionError("map_compose: dimension mismatch");
    if (!inner.has_zero_constant())
        throw PreconditionError("map_compose: inner map must fix the origin");
    int n = outer.dim();

    // Powers of each inner component, memoized up to the exponent actually
    // used.  inner has no constant term, so inner_j^k has valuation >= k.
    std::vector<std::vector<CPoly>> powers(n);
    for (int j = 0; j < n; ++j)
        powers[j].push_back(CPoly::constant(n, 1.0, trunc));  // exponent 0

    auto power = [&](int j, int e) -> const CPoly& {
        while (int(powers[j].size()) <= e) {
            const CPoly& prev = powers[j].back();
            if (powers[j].size() == 1)
                powers[j].push_back(inner.comp(j).truncated(trunc));
            else
                powers[j].push_back(poly_mul(prev, inner.comp(j), trunc));
        }
        return powers[j][e];
    };

    std::vector<CPoly> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i) {
        CPoly acc(n, trunc);
        for (const auto& [mi, c] : outer.comp(i).terms()) {
            if (mi.degree() > trunc) continue;  // valuation bound
            CPoly term = CPoly::constant(n, c, trunc);
            for (int j = 0; j < n; ++j)
                if (mi.e[j] > 0) term = poly_mul(term, power(j, mi.e[j]), trunc);
            acc = poly_add(acc, term);
        }
        comps.push_back(acc.truncated(trunc));
    }
    return PolyMap(std::move(comps), trunc);
}

PolyMap map_inverse_formal(const PolyMap& t, int trunc) {
    if (!t.has_zero_constant())
        throw PreconditionError("map_inverse_formal: map must fix the origin");
    int n = t.dim();
    CMatrix lin = t.linear_part();
    Eigen::FullPivLU<CMatrix> lu(lin);
    if (!lu.isInvertible())
        throw PreconditionError("map_inverse_formal: singular linear part");
    CMatrix lin_inv = lu.inverse();

    PolyMap s = PolyMap::from_linear(lin_inv, trunc);
    PolyMap id = PolyMap::identity(n, trunc);
    // Newton-free order-by-order correction: degree-d defects of t(s) - id are
    // killed by s_d -= L^{-1} * defect_d; lower degrees stay fixed.
    for (int d = 2; d <= trunc; ++d) {
        PolyMap err = map_sub(map_compose(t, s, d), id.truncated(d));
        PolyMap err_d = err.homogeneous_part(d);
        if (err_d.max_abs_coeff() == 0.0) continue;
        for (const MultiIndex& mi : multi_indices_of_degree(n, d)) {
            CVec v(n);
            bool any = false;
            for (int i = 0; i < n; ++i) {
                v[i] = err_d.comp(i).coeff(mi);
                if (v[i] != cdouble(0.0)) any = true;
            }
            if (!any) continue;
            CVec w = lin_inv * v;
            for (int i = 0; i < n; ++i) s.comp(i).add_term(mi, -w[i]);
        }
    }
    return s;
}

PolyMap shift_germ(const PolyMap& p, const CVec& q, int trunc) {
    int n = p.dim();
    if (q.size() != n) throw PreconditionError("shift_germ: point dimension mismatch");

    // Binomial tables (q_j + x_j)^e as univariate expansions in x_j.
    int maxe = std::max(p.degree(), 1);
    std::vector<std::vector<std::vector<cdouble>>> binom(n);
    for (int j = 0; j < n; ++j) {
        binom[j].resize(maxe + 1);
        binom[j][0] = {1.0};
        for (int e = 1; e <= maxe; ++e) {
            const auto& prev = binom[j][e - 1];
            std::vector<cdouble> cur(e + 1, 0.0);
            for (int k = 0; k < int(prev.size()); ++k) {
                cur[k] += prev[k] * q[j];  // multiply by q_j
                cur[k + 1] += prev[k];     // multiply by x_j
            }
            binom[j][e] = cur;
        }
    }

    std::vector<CPoly> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i) {
        CPoly acc(n, trunc);
        for (const auto& [mi, c] : p.comp(i).terms()) {
            CPoly term = CPoly::constant(n, c, trunc);
            for (int j = 0; j < n; ++j) {
                if (mi.e[j] == 0) continue;
                CPoly uni(n, trunc);
                const auto& coeffs = binom[j][mi.e[j]];
                for (int k = 0; k < int(coeffs.size()); ++k) {
                    if (coeffs[k] == cdouble(0.0)) continue;
                    MultiIndex mk = MultiIndex::zeros(n);
                    mk.e[j] = k;
                    uni.add_term(mk, coeffs[k]);
                }
                term = poly_mul(term, uni, trunc);
            }
            acc = poly_add(acc, term);
        }
        // Remove the constant exactly: the germ is based at the image point.
        acc.set_coeff(MultiIndex::zeros(n), 0.0);
        comps.push_back(acc);
    }
    return PolyMap(std::move(comps), trunc);
}

PolyMap conjugate_by_unitary(const PolyMap& m, const CMatrix& q, int trunc) {
    PolyMap inner = map_compose(m, PolyMap::from_linear(q, trunc), trunc);
    return map_compose(PolyMap::from_linear(q.adjoint(), trunc), inner, trunc);
}

// --------------------------------------------------------------- CompiledMap

CompiledMap::CompiledMap(const PolyMap& m) : dim_(m.dim()) {
    comps_.resize(dim_);
    for (int i = 0; i < dim_; ++i) {
        auto& dst = comps_[i];
        dst.reserve(m.comp(i).terms().size());
        for (const auto& [mi, c] : m.comp(i).terms()) dst.push_back({mi.e, c});
        std::sort(dst.begin(), dst.end(), [](const Term& a, const Term& b) {
            return std::lexicographical_compare(a.e.begin(), a.e.end(), b.e.begin(), b.e.end());
        });
    }
}

namespace {
cdouble pow_int(cdouble z, int e) {
    cdouble r = 1.0;
    while (e-- > 0) r *= z;
    return r;
}
}  // namespace

cdouble CompiledMap::eval_component(const std::vector<Term>& terms, const CVec& z) const {
    // Sparse multivariate Horner on the lexicographically sorted term list.
    auto rec = [&](auto&& self, size_t lo, size_t hi, int var) -> cdouble {
        if (var == dim_) return terms[lo].c;
        // Group [lo,hi) by exponent of `var`; exponents ascend with lex order.
        struct Group {
            int exp;
            size_t lo, hi;
        };
        std::vector<Group> groups;
        size_t i = lo;
        while (i < hi) {
            int e = terms[i].e[var];
            size_t j = i;
            while (j < hi && terms[j].e[var] == e) ++j;
            groups.push_back({e, i, j});
            i = j;
        }
        // Horner from the highest exponent down, multiplying by the gap.
        cdouble acc = 0.0;
        int prev_exp = -1;
        for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
            cdouble sub = self(self, it->lo, it->hi, var + 1);
            if (prev_exp < 0)
                acc = sub;
            else
                acc = acc * pow_int(z[var], prev_exp - it->exp) + sub;
            prev_exp = it->exp;
        }
        if (prev_exp > 0) acc *= pow_int(z[var], prev_exp);
        return acc;
    };
    if (terms.empty()) return 0.0;
    return rec(rec, 0, terms.size(), 0);
}

CVec CompiledMap::eval(const CVec& z) const {
    if (z.size() != dim_) throw PreconditionError("map eval: point dimension mismatch");
    CVec out(dim_);
    for (int i = 0; i < dim_; ++i) out[i] = eval_component(comps_[i], z);
    return out;
}

// ----------------------------------------------------------- text formatting

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_complex(const cdouble& z) {
    return format_double(z.real()) + " " + format_double(z.imag());
}

std::string format_point(const CVec& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ";";
        s += format_double(v[i].real()) + "," + format_double(v[i].imag());
    }
    return s;
}

CVec parse_point(const std::string& s) {
    std::vector<cdouble> vals;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ';')) {
        auto comma = part.find(',');
        double re = std::stod(part.substr(0, comma));
        double im = comma == std::string::npos ? 0.0 : std::stod(part.substr(comma + 1));
        vals.push_back({re, im});
    }
    if (vals.empty()) throw PreconditionError("parse_point: empty point");
    CVec v(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
    return v;
}

}  // namespace fatou
