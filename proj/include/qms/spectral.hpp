// Semigroup asymptotics of a channel: peripheral eigenvalue clusters, the
// asymptotic part Phi_inf and peripheral projector P, the decay rate
// mu = spr(Phi - Phi_inf), the diamond-norm distance sequence
// Delta_n = ||Phi^n - Phi_inf^n||_diamond, and the empirical envelope
// constant kappa with Delta_n <= kappa mu^n over a tested range.

#pragma once

#include "qms/channels.hpp"
#include "qms/linalg.hpp"

#include <utility>
#include <vector>

namespace qms {

struct EigClusterInfo {
    Cplx value;
    int algebraic = 0;
    int geometric = 0;
    bool peripheral = false;
    bool ambiguous = false;       // 1-1e-6 < |value| < 1-1e-8
};

struct SpectrumReport {
    std::vector<EigClusterInfo> clusters;   // by decreasing |value|
    std::vector<EigCluster> detail;         // same order, with eigenvectors
    bool has_nilpotent_nonperipheral = false;
    double tol = 1e-8;
    int dim = 0;
    int peripheral_count = 0;               // with algebraic multiplicity
    double mu = 0.0;                        // largest non-peripheral magnitude
};

SpectrumReport analyze_spectrum(const Channel& phi, double tol = 1e-8);

struct AsymptoticPart {
    Channel phi_inf;
    Channel proj_p;
    // peripheral (eigenvalue, spectral projector superop) pairs
    std::vector<std::pair<Cplx, CMat>> components;
    bool used_schur_fallback = false;
    double projector_cond = 0.0;
};

// Assembles Phi_inf and P from biorthogonal spectral projectors; falls back
// to a Schur-form invariant-subspace construction when the eigenvector
// pairing is ill-conditioned. Both outputs are validated as channels.
AsymptoticPart asymptotic_part(const Channel& phi, const SpectrumReport& report);

// Spectral radius of Phi - Phi_inf; exactly 0 for idempotent-convergent channels.
double spectral_gap_mu(const Channel& phi, const AsymptoticPart& asym);

// Superoperator of Phi^n - Phi_inf^n.
CMat deviation_superop(const Channel& phi, const AsymptoticPart& asym, long n);

// Delta_n via the diamond-norm SDP on the difference map.
double delta_n(const Channel& phi, const AsymptoticPart& asym, long n);

// Delta_n for several n, evaluated concurrently (workers = 0 picks the
// hardware concurrency). Results are in the order of ns.
std::vector<double> delta_sequence(const Channel& phi, const AsymptoticPart& asym,
                                   const std::vector<long>& ns, int workers = 0);

struct KappaFit {
    double kappa = 0.0;
    double mu = 0.0;
    bool exact_convergence = false;   // mu == 0
    double fitted_slope = 0.0;        // least-squares slope of log2 Delta_n
    double target_slope = 0.0;        // log2 mu
    bool slope_ok = false;            // within 2% over the tail
    std::vector<std::pair<long, double>> deltas;
};

// Smallest kappa with Delta_n <= kappa mu^n over n_range, plus a slope check
// on the tail of the sequence.
KappaFit fit_kappa(const Channel& phi, const AsymptoticPart& asym,
                   const std::vector<long>& n_range);

}  // namespace qms
