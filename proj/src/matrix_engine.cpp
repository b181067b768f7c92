#include "fatou/matrix_engine.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace fatou {

namespace {

bool modulus_less(const cdouble& a, const cdouble& b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

bool is_lower_triangular(const CMatrix& a, double tol) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j)) > tol) return false;
    return true;
}

// Swap the adjacent diagonal entries k, k+1 of an upper-triangular t by a
// unitary similarity, accumulating into u.
void swap_schur_diag(CMatrix& t, CMatrix& u, int k) {
    cdouble a = t(k, k), b = t(k, k + 1), d = t(k + 1, k + 1);
    // Eigenvector of [[a,b],[0,d]] for eigenvalue d is (b, d-a).
    cdouble x1 = b, x2 = d - a;
    double nrm = std::sqrt(std::norm(x1) + std::norm(x2));
    if (nrm < 1e-300) return;  // equal eigenvalues, order immaterial
    x1 /= nrm;
    x2 /= nrm;
    CMatrix g = CMatrix::Identity(t.rows(), t.cols());
    g(k, k) = x1;
    g(k + 1, k) = x2;
    g(k, k + 1) = -std::conj(x2);
    g(k + 1, k + 1) = std::conj(x1);
    t = g.adjoint() * t * g;
    u = u * g;
    t(k + 1, k) = 0.0;  // exact by construction, clear roundoff
}

}  // namespace

std::vector<cdouble> eigenvalues(const CMatrix& a) {
    if (a.rows() != a.cols()) throw PreconditionError("eigenvalues: matrix not square");
    Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigenvalues: QR iteration cap exceeded");
    std::vector<cdouble> evs(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) evs[i] = solver.eigenvalues()[i];
    std::sort(evs.begin(), evs.end(), modulus_less);
    return evs;
}

SchurLower lower_triangularize(const CMatrix& a) {
    if (a.rows() != a.cols()) throw PreconditionError("lower_triangularize: matrix not square");
    int n = int(a.rows());
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (is_lower_triangular(a, 1e-14 * scale))
        return {CMatrix::Identity(n, n), a};

    Eigen::ComplexSchur<CMatrix> schur(a, /*computeU=*/true);
    if (schur.info() != Eigen::Success)
        throw NumericalError("lower_triangularize: Schur iteration cap exceeded");
    CMatrix t = schur.matrixT();  // upper triangular
    CMatrix u = schur.matrixU();

    // Ascending modulus down the upper-triangular diagonal; the flip below
    // reverses it, leaving the lower form with descending modulus.
    for (int pass = 0; pass < n; ++pass) {
        bool swapped = false;
        for (int k = 0; k + 1 < n; ++k) {
            if (modulus_less(t(k + 1, k + 1), t(k, k))) {
                swap_schur_diag(t, u, k);
                swapped = true;
            }
        }
        if (!swapped) break;
    }

    // Reverse the basis order: J t J is lower triangular for upper t.
    CMatrix j = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) j(i, n - 1 - i) = 1.0;
    SchurLower out{u * j, j * t * j};

    // Clear the strictly upper part (roundoff from the similarity updates).
    double resid = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) {
            resid = std::max(resid, std::abs(out.t(r, c)));
            out.t(r, c) = 0.0;
        }
    if (resid > 1e-10 * scale)
        throw NumericalError("lower_triangularize: triangular residual too large");
    return out;
}

RegularityNbhd scaling_neighborhood(const CMatrix& a, double margin) {
    auto evs = eigenvalues(a);
    double spec = 0.0;
    for (const auto& ev : evs) spec = std::max(spec, std::abs(ev));
    if (spec >= 1.0)
        throw PreconditionError("scaling_neighborhood: not attracting (spectral radius >= 1)");
    double alpha = std::min(spec + margin, 0.99);

    SchurLower sl = lower_triangularize(a);
    int n = int(a.rows());

    RegularityNbhd r;
    r.dim = n;
    r.alpha = alpha;
    r.frame = sl.q;
    r.rho = 0.0;

    double eps = 1.0;
    for (int step = 1; step <= 40; ++step) {
        eps *= 0.5;
        // diag(eps^N, ..., eps) with exact iterated powers.
        CVec diag(n), diag_inv(n);
        double p = 1.0;
        for (int i = n - 1; i >= 0; --i) {
            p *= eps;
            diag[i] = p;
            diag_inv[i] = 1.0 / p;
        }
        CMatrix conj = diag_inv.asDiagonal() * sl.t * CMatrix(diag.asDiagonal());
        if (operator_norm(conj) <= alpha) {
            r.eps = eps;
            r.scaling = diag.asDiagonal();
            return r;
        }
    }
    throw NumericalError("scaling_neighborhood: no eps found in the dyadic sweep");
}

double operator_norm(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()[0];
}

double scaled_frame_norm(const RegularityNbhd& r, const CVec& x) {
    CVec y = r.frame.adjoint() * x;
    double s = 0.0;
    for (int i = 0; i < r.dim; ++i) s += std::norm(y[i] / r.scaling(i, i));
    return std::sqrt(s);
}

}  // namespace fatou
