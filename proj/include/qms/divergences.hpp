// Closed-form divergences: max-relative entropy, fidelity, trace distance,
// and the Schmidt-coefficient formula for D_max to the separable set on pure
// states. All logarithms are base 2; values are in bits.

#pragma once

#include "qms/linalg.hpp"

namespace qms {

struct DivergenceValue {
    double bits = 0.0;
    bool finite = true;
    double truncated_bits = 0.0;    // value on the truncated support when infinite
};

// D_max(rho || sigma) = log2 || sigma^{-1/2} rho sigma^{-1/2} ||_inf, with a
// support check at eigenvalue threshold supp_tol; +infinity when
// supp rho is not contained in supp sigma.
DivergenceValue dmax(const CMat& rho, const CMat& sigma, double supp_tol = 1e-10);

// F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1^2, in [0,1] for states.
double fidelity(const CMat& rho, const CMat& sigma);

double trace_distance(const CMat& rho, const CMat& sigma);

// inf over separable sigma of D_max(psi || sigma) = 2 log2(sum of Schmidt
// coefficients), for a pure bipartite state on C^{da} (x) C^{db}.
// Throws if the input is not rank one within pure_tol.
double dmax_sep_pure(const CMat& psi, int da, int db, double pure_tol = 1e-9);

}  // namespace qms
