// One-shot epsilon-error capacity bounds of Phi^n from the peripheral block
// dimensions: lower bounds log2(max_k d_k) (quantum, private), log2(sum d_k)
// (classical) and log2(sum d_k^2) (entanglement-assisted); upper bounds add
// log2 1/(1 - eps - delta) whenever eps + delta < 1, with delta either the
// exact Delta_n or the kappa mu^n envelope. Infinite-time intervals and the
// IID (tensor-power) scaling follow the same arithmetic. Bits throughout.

#pragma once

#include "qms/structure.hpp"

#include <array>
#include <optional>
#include <string>

namespace qms {

enum class CapKind { Q = 0, C = 1, Cp = 2, Cea = 3 };

constexpr std::array<CapKind, 4> kAllKinds{CapKind::Q, CapKind::C, CapKind::Cp, CapKind::Cea};

std::string kind_name(CapKind k);

struct KindBounds {
    double lower = 0.0;
    std::optional<double> upper;    // absent iff eps + delta >= 1
    bool valid = false;             // upper defined
};

struct BoundsReport {
    long n = 0;
    double epsilon = 0.0;
    double delta_used = 0.0;
    std::string delta_source;       // "sdp" or "envelope"
    std::array<KindBounds, 4> kinds;
};

// Lower bounds in bits; independent of n and eps.
std::array<double, 4> lower_bounds(const PeripheralDecomposition& decomp);

// Lower + additive penalty when eps + delta < 1; undefined uppers otherwise.
BoundsReport upper_bounds(const PeripheralDecomposition& decomp, double eps, long n,
                          double delta, const std::string& delta_source);

// [lower, lower + log2 1/(1-eps)] per kind.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};
std::array<Interval, 4> infinite_time(const PeripheralDecomposition& decomp, double eps);

// Bounds for Psi^{(x)m} evolved n steps, without materializing the tensor
// power: lower bounds scale by m, the deviation envelope by m * kappa * mu^n.
struct IidBounds {
    long m = 0;
    long n = 0;
    double epsilon = 0.0;
    double delta_used = 0.0;        // m * kappa * mu^n
    std::array<KindBounds, 4> total;
    std::array<KindBounds, 4> per_copy;   // total / m; upper carries (1/m) log2 1/(1-eps-delta)
};

IidBounds iid_bounds(const PeripheralDecomposition& per_copy_decomp, double kappa, double mu,
                     long m, double eps, long n);

// Smallest n >= 1 with kappa * mu^n <= delta_target; requires 0 < mu < 1.
long convergence_time(double kappa, double mu, double delta_target);

}  // namespace qms
