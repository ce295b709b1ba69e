#include "qms/divergences.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qms {

DivergenceValue dmax(const CMat& rho, const CMat& sigma, double supp_tol) {
    if (rho.rows() != sigma.rows() || rho.rows() != rho.cols() || sigma.rows() != sigma.cols())
        throw std::invalid_argument("dmax: shape mismatch");
    const CMat rho_h = ((rho + rho.adjoint()) / 2.0).eval();
    const CMat sig_h = ((sigma + sigma.adjoint()) / 2.0).eval();

    const CMat proj = support_projector(sig_h, supp_tol);
    const CMat outside = (CMat::Identity(rho.rows(), rho.rows()) - proj) * rho_h *
                         (CMat::Identity(rho.rows(), rho.rows()) - proj);
    const CMat inv_sqrt = psd_inv_sqrt(sig_h, supp_tol);
    const double val = op_norm(inv_sqrt * rho_h * inv_sqrt);

    DivergenceValue out;
    out.truncated_bits = (val > 0) ? std::log2(val) : -std::numeric_limits<double>::infinity();
    const double leak = op_norm(outside);
    if (leak > supp_tol * std::max(1.0, op_norm(rho_h))) {
        out.finite = false;
        out.bits = std::numeric_limits<double>::infinity();
    } else {
        out.bits = out.truncated_bits;
    }
    return out;
}

double fidelity(const CMat& rho, const CMat& sigma) {
    const CMat sr = psd_sqrt(rho, 1e-8);
    const CMat ss = psd_sqrt(sigma, 1e-8);
    const double tn = trace_norm(sr * ss);
    return tn * tn;
}

double trace_distance(const CMat& rho, const CMat& sigma) { return trace_norm(rho - sigma); }

double dmax_sep_pure(const CMat& psi, int da, int db, double pure_tol) {
    if (psi.rows() != static_cast<Eigen::Index>(da) * db || psi.rows() != psi.cols())
        throw std::invalid_argument("dmax_sep_pure: shape mismatch");
    Eigen::SelfAdjointEigenSolver<CMat> es((psi + psi.adjoint()) / 2.0);
    const RVec vals = es.eigenvalues();
    const int n = static_cast<int>(vals.size());
    if (vals(n - 1) <= 0 || (n > 1 && std::abs(vals(n - 2)) > pure_tol * vals(n - 1)))
        throw std::invalid_argument("dmax_sep_pure: input is not rank one");
    // Schmidt coefficients are the singular values of the reshaped state vector
    CMat amp(da, db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j)
            amp(i, j) = es.eigenvectors()(static_cast<long>(i) * db + j, n - 1);
    amp *= std::sqrt(vals(n - 1));
    Eigen::JacobiSVD<CMat> svd(amp);
    return 2.0 * std::log2(svd.singularValues().sum());
}

}  // namespace qms
