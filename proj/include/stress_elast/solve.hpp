#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/CholmodSupport>
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <lapacke.h>
#include <umfpack.h>

#include "stress_elast/errors.hpp"

namespace stress_elast {

using SparseMatrix = Eigen::SparseMatrix<double>;

inline double max_abs(const SparseMatrix& K) {
    double m = 0.0;
    for (int k = 0; k < K.nonZeros(); ++k) m = std::max(m, std::abs(K.valuePtr()[k]));
    return m;
}

namespace detail {

// Owning handle on an UMFPACK LU factorization of a compressed column matrix.
class UmfpackLU {
public:
    explicit UmfpackLU(const SparseMatrix& K) : K_(K) {
        K_.makeCompressed();
        umfpack_di_defaults(control_);
        const int n = static_cast<int>(K_.rows());
        int status = umfpack_di_symbolic(n, n, K_.outerIndexPtr(), K_.innerIndexPtr(),
                                         K_.valuePtr(), &symbolic_, control_, info_);
        if (status < 0) throw NumericalError("UMFPACK symbolic analysis failed");
        status = umfpack_di_numeric(K_.outerIndexPtr(), K_.innerIndexPtr(), K_.valuePtr(),
                                    symbolic_, &numeric_, control_, info_);
        if (status < 0) throw NumericalError("UMFPACK numeric factorization failed");
        singular_flag_ = status == UMFPACK_WARNING_singular_matrix;
    }
    UmfpackLU(const UmfpackLU&) = delete;
    UmfpackLU& operator=(const UmfpackLU&) = delete;
    ~UmfpackLU() {
        if (numeric_) umfpack_di_free_numeric(&numeric_);
        if (symbolic_) umfpack_di_free_symbolic(&symbolic_);
    }

    double rcond() const { return info_[UMFPACK_RCOND]; }
    bool flagged_singular() const { return singular_flag_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        Eigen::VectorXd x(b.size());
        double info[UMFPACK_INFO];
        const int status =
            umfpack_di_solve(UMFPACK_A, K_.outerIndexPtr(), K_.innerIndexPtr(), K_.valuePtr(),
                             x.data(), b.data(), numeric_, control_, info);
        if (status < 0) throw NumericalError("UMFPACK solve failed");
        return x;
    }

    // Pivots of U that are negligible relative to the largest one.
    long tiny_pivots(double rel) const {
        const int n = static_cast<int>(K_.rows());
        std::vector<double> diag(n);
        int do_recip = 0;
        umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                               nullptr, diag.data(), &do_recip, nullptr, numeric_);
        double big = 0.0;
        for (double d : diag) big = std::max(big, std::abs(d));
        return std::count_if(diag.begin(), diag.end(),
                             [&](double d) { return std::abs(d) <= rel * big; });
    }

private:
    SparseMatrix K_;
    void* symbolic_ = nullptr;
    void* numeric_ = nullptr;
    double control_[UMFPACK_CONTROL];
    double info_[UMFPACK_INFO];
    bool singular_flag_ = false;
};

// Supernodal Cholesky that also reports CHOLMOD's reciprocal condition estimate.
class CholmodLLT : public Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> {
public:
    CholmodLLT() { this->cholmod().print = 0; }
    double rcond() { return cholmod_rcond(this->m_cholmodFactor, &this->cholmod()); }
};

} // namespace detail

struct SolveOptions {
    double residual_tol = 1e-9;
    double singular_rcond = 1e-13;
    int refinement_steps = 4;
    bool symmetric = true; // false skips the Cholesky attempt
};

struct SolveResult {
    Eigen::VectorXd x;
    std::string method;
    double residual = 0.0;
    double bound = 0.0;
};

inline double residual_bound(const SparseMatrix& K, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& b, double tol) {
    return tol * (max_abs(K) * x.norm() + b.norm());
}

// Direct sparse solve: supernodal Cholesky when positive definite, LU otherwise.
inline SolveResult solve_linear(const SparseMatrix& K, const Eigen::VectorXd& b,
                                const SolveOptions& opt = {}) {
    if (K.rows() != K.cols() || K.rows() != b.size())
        throw PreconditionError("solve_linear: dimension mismatch");
    SolveResult res;
    if (K.rows() == 0) return res;

    auto refine = [&](auto&& apply_inverse) {
        Eigen::VectorXd x = apply_inverse(b);
        for (int step = 0; step <= opt.refinement_steps; ++step) {
            const Eigen::VectorXd r = b - K * x;
            res.residual = r.norm();
            res.bound = residual_bound(K, x, b, opt.residual_tol);
            if (res.residual <= res.bound || step == opt.refinement_steps) break;
            x += apply_inverse(r);
        }
        return x;
    };

    if (opt.symmetric) {
        detail::CholmodLLT llt;
        llt.compute(K);
        if (llt.info() == Eigen::Success && llt.rcond() > opt.singular_rcond) {
            res.method = "cholmod_llt";
            res.x = refine([&](const Eigen::VectorXd& r) -> Eigen::VectorXd { return llt.solve(r); });
            if (res.residual <= res.bound && res.x.allFinite()) return res;
        }
    }

    const detail::UmfpackLU lu(K);
    if (lu.flagged_singular() || !(lu.rcond() > opt.singular_rcond)) {
        const long kernel = std::max(1L, lu.tiny_pivots(1e-10));
        throw SingularMatrixError("matrix is singular (rcond " + std::to_string(lu.rcond()) +
                                      "), estimated kernel dimension " + std::to_string(kernel),
                                  kernel);
    }
    res.method = "umfpack_lu";
    res.x = refine([&](const Eigen::VectorXd& r) { return lu.solve(r); });
    if (!(res.residual <= res.bound) || !res.x.allFinite())
        throw NumericalError("solver residual " + std::to_string(res.residual) +
                             " exceeds contract bound " + std::to_string(res.bound));
    return res;
}

struct SpectrumReport {
    std::vector<double> eigenvalues; // ascending
    long negative = 0;
    long zero = 0;
    long positive = 0;
    double zero_tol_rel = 1e-9;
    double threshold = 0.0; // absolute cut: zero_tol_rel * max |lambda|
    std::map<std::string, std::string> metadata;

    long dimension() const { return static_cast<long>(eigenvalues.size()); }
};

inline constexpr long default_dense_cap = 8000;

inline SpectrumReport spectrum(const Eigen::MatrixXd& A, double zero_tol_rel = 1e-9,
                               long dense_cap = default_dense_cap) {
    if (A.rows() != A.cols()) throw PreconditionError("spectrum needs a square matrix");
    if (!(zero_tol_rel > 0.0)) throw PreconditionError("zero threshold must be positive");
    const long n = A.rows();
    if (n > dense_cap)
        throw PreconditionError("spectrum: dimension " + std::to_string(n) +
                                " exceeds the dense cap " + std::to_string(dense_cap) +
                                "; use a smaller mesh");
    SpectrumReport rep;
    rep.zero_tol_rel = zero_tol_rel;
    if (n == 0) return rep;
    Eigen::MatrixXd work = A;
    std::vector<double> w(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', static_cast<lapack_int>(n),
                                           work.data(), static_cast<lapack_int>(n), w.data());
    if (info != 0) throw NumericalError("dsyevd failed with code " + std::to_string(info));
    rep.eigenvalues = std::move(w);
    double big = 0.0;
    for (double l : rep.eigenvalues) big = std::max(big, std::abs(l));
    rep.threshold = zero_tol_rel * big;
    for (double l : rep.eigenvalues) {
        if (std::abs(l) <= rep.threshold) ++rep.zero;
        else if (l < 0.0) ++rep.negative;
        else ++rep.positive;
    }
    return rep;
}

inline SpectrumReport spectrum(const SparseMatrix& K, double zero_tol_rel = 1e-9,
                               long dense_cap = default_dense_cap) {
    if (K.rows() > dense_cap)
        throw PreconditionError("spectrum: dimension " + std::to_string(K.rows()) +
                                " exceeds the dense cap " + std::to_string(dense_cap) +
                                "; use a smaller mesh");
    return spectrum(Eigen::MatrixXd(K), zero_tol_rel, dense_cap);
}

} // namespace stress_elast
