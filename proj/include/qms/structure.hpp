// Canonical decomposition of the peripheral space
//     chi(Phi) = 0 (+) sum_k B(H_{k,1}) (x) delta_k
// together with the permutation pi and unitaries U_k describing the action
//     Phi(0 (+) sum_k x_k (x) delta_k) = 0 (+) sum_k U_k^dag x_{pi(k)} U_k (x) delta_k,
// and the restriction of the peripheral projector away from H_0.
//
// The extraction runs: support of P(I/d) -> fixed-point *-algebra of the
// compressed projector's adjoint -> minimal central projections via a random
// central element -> tensor factorization per block via a random algebra
// element. Randomized steps are seeded and retried on degenerate draws.

#pragma once

#include "qms/channels.hpp"
#include "qms/linalg.hpp"
#include "qms/spectral.hpp"

#include <cstdint>
#include <vector>

namespace qms {

struct structure_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PeripheralBlock {
    int index = 0;     // canonical position
    int d = 0;         // dim H_{k,1}
    int m = 0;         // dim H_{k,2}
    CMat isometry;     // W_k : C^d (x) C^m -> H_A, W_k^dag W_k = I
    CMat delta;        // positive definite state on H_{k,2}, trace 1
    CMat unitary;      // U_k on H_{k,1}, phase-fixed (largest entry real positive)
};

struct PeripheralDecomposition {
    int dim_total = 0;
    int dim_h0 = 0;
    std::vector<PeripheralBlock> blocks;
    std::vector<int> pi;            // pi[k] = source block: output k reads input pi(k)
    CMat h0perp_isometry;           // V0 : H_0-perp -> H_A
    double residual = 0.0;          // action-equation residual over a full chi basis
    bool canonical_not_unique = false;
    std::uint64_t seed = 0;
};

// Orthonormal (Hilbert-Schmidt) basis of the image of P; rank decided at
// singular value threshold sv_tol with a 10x gap stability check.
std::vector<CMat> peripheral_basis(const AsymptoticPart& asym, double sv_tol = 1e-8);

// Blocks, isometries and delta_k (pi and U_k left empty; see recover_action).
PeripheralDecomposition block_decompose(const AsymptoticPart& asym,
                                        const std::vector<CMat>& basis,
                                        std::uint64_t seed = 0);

// Fills pi and the U_k by tracking block supports under Phi and fitting the
// action on matrix units; records the residual over a full chi basis.
void recover_action(const Channel& phi, PeripheralDecomposition& decomp);

// The channel P-bar on H_0-perp (Tr_2-then-tensor-delta form); capacities of P
// are upper bounded by those of P-bar. *noop set when dim_h0 == 0.
Channel restrict_away_h0(const AsymptoticPart& asym, const PeripheralDecomposition& decomp,
                         bool* noop = nullptr);

// Max trace-norm residual of the action equation over matrix units of chi.
double phaseaction_residual(const Channel& phi, const PeripheralDecomposition& decomp);

// Convenience pipeline: spectrum -> asymptotic part -> decomposition + action.
struct Analysis {
    Channel channel;
    SpectrumReport spectrum;
    AsymptoticPart asym;
    PeripheralDecomposition decomp;
    double mu = 0.0;
};

Analysis analyze_channel(const Channel& phi, double tol = 1e-8, std::uint64_t seed = 0);

}  // namespace qms
