// Dense complex linear algebra kernel: Kronecker products, partial traces,
// general (non-Hermitian) eigendecompositions with multiplicity clustering,
// trace norms and PSD square roots. Everything here is a pure function over
// immutable Eigen matrices; ambient dimensions stay small (<= ~10^2 rows).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace qms {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Ordered subsystem dimensions; product must equal the ambient dimension.
using DimList = std::vector<int>;

long dim_product(const DimList& dims);

// ===========================================================================
// Density operators
// ===========================================================================

struct DensityOp {
    int dim = 0;
    CMat matrix;
};

// Validates Hermiticity, positivity (eigenvalues >= -tol) and unit trace.
DensityOp make_density(const CMat& m, double tol = 1e-9);

// ===========================================================================
// Multilinear operations
// ===========================================================================

// Kronecker product with lexicographic index order: (a x b)[(i,k),(j,l)] = a_ij b_kl.
CMat kron(const CMat& a, const CMat& b);

// Trace over the factors not listed in `keep` (0-based positions into dims).
// The kept factors retain their original relative order.
CMat partial_trace(const CMat& x, const DimList& dims, const std::vector<int>& keep);

// Sum of singular values.
double trace_norm(const CMat& x);

// ||x||_inf, largest singular value.
double op_norm(const CMat& x);

// Hermitian PSD square root; throws if a negative eigenvalue exceeds tol.
CMat psd_sqrt(const CMat& x, double tol = 1e-9);

// Pseudo-inverse square root on the support of a Hermitian PSD matrix.
// Eigenvalues below eig_tol are treated as zero.
CMat psd_inv_sqrt(const CMat& x, double eig_tol = 1e-10);

// Hilbert-Schmidt inner product Tr(a^dag b).
Cplx hs_inner(const CMat& a, const CMat& b);

// Orthogonal projector onto the support of a Hermitian PSD matrix.
CMat support_projector(const CMat& x, double eig_tol = 1e-10);

// ===========================================================================
// General eigendecomposition with eigenvalue clustering
// ===========================================================================

// One cluster of numerically coincident eigenvalues. `right` holds an
// orthonormal basis of the (geometric) right eigenspace; `left` is
// biorthogonalized against `right` cluster-by-cluster whenever the pairing
// matrix is invertible, so that right * left^dag is the spectral projector.
struct EigCluster {
    Cplx value;          // cluster representative (mean)
    int algebraic = 0;
    int geometric = 0;
    CMat right;          // dim x geometric, orthonormal columns
    CMat left;           // dim x geometric; left^dag * right = I when biorthogonal
    bool biorthogonal = false;
    double pairing_cond = 0.0;  // condition number of left^dag * right
};

struct EigOptions {
    double cluster_tol = 1e-8;   // eigenvalues closer than this merge
    double rank_tol = 1e-9;      // relative threshold for eigenspace rank
};

// Clusters of eigenvalues ordered by decreasing |value|. Throws on
// eigensolver failure; never silently returns partial results.
std::vector<EigCluster> eig_general(const CMat& x, const EigOptions& opts = {});

// ===========================================================================
// Seeded randomness (deterministic given the seed)
// ===========================================================================

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double normal() { return normal_(gen_); }
    double uniform() { return uniform_(gen_); }
    std::uint64_t raw() { return gen_(); }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

CMat random_ginibre(int rows, int cols, Rng& rng);
CMat random_unitary(int d, Rng& rng);
CMat random_hermitian(int d, Rng& rng);  // GUE-like, norm O(sqrt d)
CMat random_psd(int d, Rng& rng);        // full rank a.s.
CMat random_density(int d, Rng& rng);    // full rank a.s.
CVec random_pure(int d, Rng& rng);       // unit vector

}  // namespace qms
