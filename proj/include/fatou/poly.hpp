#pragma once

// Sparse multivariate polynomial algebra over C and formal map composition /
// reversion.  Coefficients are double-precision complex; truncation orders are
// explicit per operation, never implicit.

#include <map>
#include <vector>

#include "fatou/errors.hpp"
#include "fatou/types.hpp"

namespace fatou {

struct MultiIndex {
    std::vector<int> e;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exps) : e(std::move(exps)) {}
    static MultiIndex zeros(int n) { return MultiIndex(std::vector<int>(n, 0)); }
    static MultiIndex unit(int n, int var);

    int dim() const { return int(e.size()); }
    int degree() const;
    bool operator==(const MultiIndex& o) const { return e == o.e; }
};

// Graded order: total degree first, then lexicographic.  Iterating a term map
// therefore visits degrees in increasing order.
struct GradedLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

class CPoly {
public:
    using TermMap = std::map<MultiIndex, cdouble, GradedLess>;

    CPoly() : dim_(1), max_degree_(0) {}
    CPoly(int dim, int max_degree) : dim_(dim), max_degree_(max_degree) {}

    static CPoly constant(int dim, cdouble c, int max_degree);
    static CPoly variable(int dim, int var, int max_degree);
    static CPoly monomial(int dim, const MultiIndex& mi, cdouble c, int max_degree);

    int dim() const { return dim_; }
    int max_degree() const { return max_degree_; }
    const TermMap& terms() const { return terms_; }

    cdouble coeff(const MultiIndex& mi) const;
    void add_term(const MultiIndex& mi, cdouble c);  // accumulates; prunes exact zeros
    void set_coeff(const MultiIndex& mi, cdouble c);

    bool is_zero() const { return terms_.empty(); }
    // Largest degree carrying a coefficient with |c| > tol; -1 if none.
    int degree(double tol = 0.0) const;
    double max_abs_coeff() const;

    CPoly truncated(int deg) const;
    CPoly homogeneous_part(int deg) const;
    void prune_below(double tol);

    cdouble eval(const CVec& z) const;

    CPoly& operator*=(cdouble s);

private:
    int dim_;
    int max_degree_;
    TermMap terms_;
};

CPoly poly_add(const CPoly& a, const CPoly& b);
CPoly poly_sub(const CPoly& a, const CPoly& b);
CPoly poly_scale(const CPoly& a, cdouble s);
CPoly poly_mul(const CPoly& a, const CPoly& b, int trunc);

// N polynomial components sharing dimension and truncation order: a formal
// self-map of C^N.
class PolyMap {
public:
    PolyMap() : trunc_(0) {}
    PolyMap(std::vector<CPoly> comps, int trunc);

    static PolyMap identity(int n, int trunc);
    static PolyMap zero(int n, int trunc);
    static PolyMap from_linear(const CMatrix& a, int trunc);

    int dim() const { return int(comps_.size()); }
    int trunc() const { return trunc_; }
    const CPoly& comp(int i) const { return comps_.at(i); }
    CPoly& comp(int i) { return comps_.at(i); }

    CMatrix linear_part() const;
    CVec constant_part() const;
    bool has_zero_constant() const;

    int degree(double tol = 0.0) const;
    double max_abs_coeff() const;
    PolyMap truncated(int deg) const;
    PolyMap homogeneous_part(int deg) const;
    void prune_below(double tol);

    CVec eval(const CVec& z) const;

private:
    std::vector<CPoly> comps_;
    int trunc_;
};

PolyMap map_add(const PolyMap& a, const PolyMap& b);
PolyMap map_sub(const PolyMap& a, const PolyMap& b);
PolyMap map_scale(const PolyMap& a, cdouble s);

// Formal composition outer(inner) truncated at trunc.  inner must fix the
// origin (zero constant term).
PolyMap map_compose(const PolyMap& outer, const PolyMap& inner, int trunc);

// Formal inverse s of t with t(s(z)) = z up to degree trunc.  t must fix the
// origin and have an invertible linear part.
PolyMap map_inverse_formal(const PolyMap& t, int trunc);

CVec map_eval(const PolyMap& m, const CVec& z);

// Taylor re-centering: x -> p(q + x) - p(q), truncated.  Exact binomial
// expansion of each monomial; the constant term is removed exactly.
PolyMap shift_germ(const PolyMap& p, const CVec& q, int trunc);

// q^{-1} o m o q for a linear change of frame q (q unitary in all our uses,
// so the inverse is the adjoint).
PolyMap conjugate_by_unitary(const PolyMap& m, const CMatrix& q, int trunc);

// Immutable evaluation form: terms flattened and sorted lexicographically so
// each component evaluates by sparse multivariate Horner.  Safe to share
// across threads.
class CompiledMap {
public:
    CompiledMap() : dim_(0) {}
    explicit CompiledMap(const PolyMap& m);

    int dim() const { return dim_; }
    bool empty() const { return dim_ == 0; }
    CVec eval(const CVec& z) const;

private:
    struct Term {
        std::vector<int> e;
        cdouble c;
    };
    cdouble eval_component(const std::vector<Term>& terms, const CVec& z) const;

    int dim_;
    std::vector<std::vector<Term>> comps_;
};

// All multi-indices of the given dimension and exact total degree, in a fixed
// deterministic order.
std::vector<MultiIndex> multi_indices_of_degree(int dim, int degree);

}  // namespace fatou
