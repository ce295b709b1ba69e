// Small dense semidefinite programming core, plus the two quantum programs
// built on it: the diamond norm of a Hermiticity-preserving map and the
// epsilon-hypothesis-testing relative entropy.
//
// Problems are stated over complex Hermitian PSD blocks:
//     minimize  sum_b <C_b, X_b>   s.t.   <A_i, X> = b_i,   X_b >= 0,
// with <A, X> = Tr(A X) (real for Hermitian arguments). Box constraints like
// 0 <= L <= I are expressed by the builders as two PSD blocks tied by an
// equality. Internally the Hermitian data is embedded once into real
// symmetric form; the interior-point core is purely real.

#pragma once

#include "qms/channels.hpp"
#include "qms/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qms::sdp {

enum class Status { optimal, max_iter, infeasible, numerical_failure };

std::string status_name(Status s);

// One Hermitian entry of a sparse constraint matrix: block `block`, position
// (row, col) with row <= col; the mirrored entry is implied conjugate. For
// row == col the value must be real.
struct HermEntry {
    int block;
    int row;
    int col;
    Cplx value;
};

struct Constraint {
    std::vector<HermEntry> entries;
    double rhs = 0.0;
};

struct SdpProblem {
    std::vector<int> block_dims;     // complex dimensions
    std::vector<CMat> objective;     // Hermitian C_b, one per block
    std::vector<Constraint> constraints;
};

struct SdpSolution {
    Status status = Status::numerical_failure;
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;                // |primal - dual|
    double primal_infeas = 0.0;
    double dual_infeas = 0.0;
    int iterations = 0;
    std::vector<CMat> x;             // primal blocks (Hermitian PSD)
    std::vector<CMat> s;             // dual slack blocks
    std::vector<double> y;           // dual multipliers
};

struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 200;
    bool verbose = false;
};

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts = {});

// -- diamond norm -------------------------------------------------------------

struct DiamondResult {
    double value = 0.0;      // certified estimate (midpoint of primal/dual)
    double primal = 0.0;     // feasible lower bound on the norm
    double dual = 0.0;       // dual upper bound on the norm
    double gap = 0.0;
    Status status = Status::numerical_failure;
};

// Completely bounded trace norm of a Hermiticity-preserving map. Throws if
// the map's Choi matrix is not Hermitian within 1e-8.
DiamondResult diamond_norm_full(const LinearMap& delta, double tol = 1e-8);
double diamond_norm(const LinearMap& delta, double tol = 1e-8);
double diamond_norm(const CMat& superop, int dim_in, int dim_out, double tol = 1e-8);

// -- hypothesis testing relative entropy ---------------------------------------

struct DhResult {
    double bits = 0.0;       // -log2 beta
    double beta = 0.0;       // optimal type-II error
    double gap = 0.0;
    bool infinite = false;   // beta numerically zero
    Status status = Status::numerical_failure;
};

// D_H^eps(rho || sigma) = -log min{ Tr(L sigma) : 0 <= L <= I, Tr(L rho) >= 1-eps }.
DhResult dh_epsilon(const CMat& rho, const CMat& sigma, double eps, double tol = 1e-9);

}  // namespace qms::sdp
