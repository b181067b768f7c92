#include "fatou/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fatou/errors.hpp"

namespace fatou {

namespace {

// Variable-weighted order making the degree-d homological operator triangular:
// substituting rows of a lower-triangular A into a monomial only moves
// exponent weight to earlier variables, and the matrix term only couples to
// later components.
struct BasisElem {
    MultiIndex alpha;
    int comp;
    long weight;  // sum_j alpha_j * j
};

long var_weight(const MultiIndex& mi) {
    long w = 0;
    for (int j = 0; j < mi.dim(); ++j) w += long(mi.e[j]) * j;
    return w;
}

std::vector<BasisElem> ordered_basis(int n, int degree) {
    std::vector<BasisElem> basis;
    for (const MultiIndex& mi : multi_indices_of_degree(n, degree))
        for (int i = 0; i < n; ++i) basis.push_back({mi, i, var_weight(mi)});
    std::sort(basis.begin(), basis.end(), [](const BasisElem& a, const BasisElem& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (!(a.alpha == b.alpha))
            return std::lexicographical_compare(b.alpha.e.begin(), b.alpha.e.end(),
                                                a.alpha.e.begin(), a.alpha.e.end());
        return a.comp < b.comp;
    });
    return basis;
}

// (A z)^alpha as a homogeneous polynomial of degree |alpha|.
CPoly linear_row_power(const CMatrix& a, const MultiIndex& alpha, int n) {
    int d = alpha.degree();
    CPoly acc = CPoly::constant(n, 1.0, d);
    for (int j = 0; j < n; ++j) {
        if (alpha.e[j] == 0) continue;
        CPoly row(n, d);
        for (int k = 0; k < n; ++k)
            if (a(j, k) != cdouble(0.0)) row.add_term(MultiIndex::unit(n, k), a(j, k));
        for (int rep = 0; rep < alpha.e[j]; ++rep) acc = poly_mul(acc, row, d);
    }
    return acc;
}

std::string describe_monomial(const MultiIndex& mi, int comp) {
    std::ostringstream os;
    os << "component " << comp << ", alpha (";
    for (int j = 0; j < mi.dim(); ++j) os << (j ? "," : "") << mi.e[j];
    os << ")";
    return os.str();
}

}  // namespace

NormalFormResult poincare_dulac(const PolyMap& f, int m, double res_tol) {
    int n = f.dim();
    if (m < 2) throw PreconditionError("poincare_dulac: order m must be >= 2");
    if (!f.has_zero_constant()) throw PreconditionError("poincare_dulac: germ must fix the origin");

    CMatrix a = f.linear_part();
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(a(i, j)) > 1e-13 * scale)
                throw PreconditionError("poincare_dulac: linear part not lower-triangular");

    std::vector<cdouble> lam(n);
    double lam_min = 1.0, lam_max = 0.0;
    for (int i = 0; i < n; ++i) {
        lam[i] = a(i, i);
        double mod = std::abs(lam[i]);
        if (mod >= 1.0)
            throw PreconditionError("poincare_dulac: not attracting (eigenvalue modulus >= 1)");
        if (mod == 0.0)
            throw PreconditionError("poincare_dulac: singular linear part");
        lam_min = std::min(lam_min, mod);
        lam_max = std::max(lam_max, mod);
    }

    // |lambda^alpha| <= lam_max^|alpha| < lam_min for |alpha| beyond this
    // bound, so no resonance can occur there.
    int degree_bound =
        lam_max < 1.0 ? int(std::floor(std::log(lam_min) / std::log(lam_max))) + 1 : m;
    int scan_limit = std::min(m - 1, degree_bound);

    NormalFormResult nf;
    nf.order_m = m;
    nf.lambda = lam;
    nf.resonance_scan_limit = scan_limit;
    nf.G = PolyMap::from_linear(a, m - 1);
    nf.T = PolyMap::identity(n, m - 1);

    for (int d = 2; d <= m - 1; ++d) {
        // Defect of the conjugacy relation T o F = G o T at this degree.
        PolyMap lhs = map_compose(nf.T, f, d);
        PolyMap rhs = map_compose(nf.G, nf.T, d);
        PolyMap defect = map_sub(lhs, rhs).homogeneous_part(d);

        auto basis = ordered_basis(n, d);
        int nb = int(basis.size());
        std::map<std::pair<std::vector<int>, int>, int> index_of;
        for (int k = 0; k < nb; ++k) index_of[{basis[k].alpha.e, basis[k].comp}] = k;

        // Homological operator L(tau) = tau(Az) - A tau on the ordered basis.
        // Column k holds the image of basis element k.
        std::vector<std::vector<std::pair<int, cdouble>>> col(nb);
        std::vector<cdouble> diag(nb);
        for (int k = 0; k < nb; ++k) {
            const auto& be = basis[k];
            CPoly az_pow = linear_row_power(a, be.alpha, n);
            for (const auto& [mi, c] : az_pow.terms()) {
                int row = index_of.at({mi.e, be.comp});
                col[k].push_back({row, c});
            }
            for (int j = 0; j < n; ++j) {
                if (a(j, be.comp) == cdouble(0.0)) continue;
                int row = index_of.at({be.alpha.e, j});
                col[k].push_back({row, -a(j, be.comp)});
            }
            diag[k] = az_pow.coeff(be.alpha) - a(be.comp, be.comp);
        }

        // Row-major view for the forward substitution.
        std::vector<std::vector<std::pair<int, cdouble>>> row(nb);
        for (int k = 0; k < nb; ++k)
            for (const auto& [r, c] : col[k]) {
                if (r == k) continue;
                if (r < k)
                    throw NumericalError("poincare_dulac: homological operator not triangular");
                row[r].push_back({k, c});
            }

        std::vector<cdouble> b(nb), x(nb, 0.0);
        for (int k = 0; k < nb; ++k)
            b[k] = -defect.comp(basis[k].comp).coeff(basis[k].alpha);

        for (int k = 0; k < nb; ++k) {
            cdouble r = b[k];
            for (const auto& [kk, c] : row[k]) r -= c * x[kk];
            if (r == cdouble(0.0) && diag[k] != cdouble(0.0)) continue;

            const auto& be = basis[k];
            double lam_i = std::abs(lam[be.comp]);
            double dv = std::abs(diag[k]);
            bool resonant = d <= scan_limit && dv <= res_tol * lam_i;
            if (!resonant && d <= scan_limit && dv < 10.0 * res_tol * lam_i) {
                nf.warnings.push_back("ill-conditioned divisor " + format_double(dv) + " at " +
                                      describe_monomial(be.alpha, be.comp));
            }
            if (resonant) {
                // Resonant term goes to G; triangularity requires support on
                // strictly earlier variables.
                for (int j = be.comp; j < n; ++j)
                    if (be.alpha.e[j] > 0)
                        throw StructuralError(
                            "poincare_dulac: resonant term violates triangular shape at " +
                            describe_monomial(be.alpha, be.comp));
                nf.G.comp(be.comp).add_term(be.alpha, -r);
                nf.resonances.push_back({be.comp, be.alpha, dv});
            } else {
                if (dv < 1e-13 * std::max(lam_i, 1e-30))
                    throw NumericalError("poincare_dulac: vanishing divisor beyond resonance bound");
                x[k] = r / diag[k];
                nf.T.comp(be.comp).add_term(be.alpha, x[k]);
            }
        }
    }
    return nf;
}

double check_residual(const NormalFormResult& nf, const PolyMap& f) {
    int m = nf.order_m;
    PolyMap g_inv = map_inverse_formal(nf.G, m - 1);
    PolyMap inner = map_compose(nf.T, f, m - 1);
    PolyMap resid = map_sub(map_compose(g_inv, inner, m - 1), nf.T.truncated(m - 1));
    double worst = 0.0;
    for (int i = 0; i < resid.dim(); ++i)
        for (const auto& [mi, c] : resid.comp(i).terms())
            if (mi.degree() < m) worst = std::max(worst, std::abs(c));
    return worst;
}

}  // namespace fatou
