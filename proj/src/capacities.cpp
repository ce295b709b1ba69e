#include "qms/capacities.hpp"

#include <cmath>
#include <stdexcept>

namespace qms {

std::string kind_name(CapKind k) {
    switch (k) {
        case CapKind::Q: return "Q";
        case CapKind::C: return "C";
        case CapKind::Cp: return "Cp";
        case CapKind::Cea: return "Cea";
    }
    return "?";
}

std::array<double, 4> lower_bounds(const PeripheralDecomposition& decomp) {
    if (decomp.blocks.empty())
        throw std::invalid_argument("lower_bounds: empty block list");
    long dmax = 0, dsum = 0, dsqsum = 0;
    for (const auto& b : decomp.blocks) {
        dmax = std::max(dmax, static_cast<long>(b.d));
        dsum += b.d;
        dsqsum += static_cast<long>(b.d) * b.d;
    }
    std::array<double, 4> out{};
    out[static_cast<int>(CapKind::Q)] = std::log2(static_cast<double>(dmax));
    out[static_cast<int>(CapKind::C)] = std::log2(static_cast<double>(dsum));
    out[static_cast<int>(CapKind::Cp)] = std::log2(static_cast<double>(dmax));
    out[static_cast<int>(CapKind::Cea)] = std::log2(static_cast<double>(dsqsum));
    return out;
}

BoundsReport upper_bounds(const PeripheralDecomposition& decomp, double eps, long n,
                          double delta, const std::string& delta_source) {
    if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("upper_bounds: eps must be in [0,1)");
    if (delta < 0.0) throw std::invalid_argument("upper_bounds: negative delta");
    BoundsReport rep;
    rep.n = n;
    rep.epsilon = eps;
    rep.delta_used = delta;
    rep.delta_source = delta_source;
    const auto lows = lower_bounds(decomp);
    const bool valid = eps + delta < 1.0;
    const double penalty = valid ? -std::log2(1.0 - eps - delta) : 0.0;
    for (int i = 0; i < 4; ++i) {
        rep.kinds[i].lower = lows[i];
        rep.kinds[i].valid = valid;
        if (valid) rep.kinds[i].upper = lows[i] + penalty;
    }
    return rep;
}

std::array<Interval, 4> infinite_time(const PeripheralDecomposition& decomp, double eps) {
    if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("infinite_time: eps must be in [0,1)");
    const auto lows = lower_bounds(decomp);
    const double penalty = -std::log2(1.0 - eps);
    std::array<Interval, 4> out{};
    for (int i = 0; i < 4; ++i) out[i] = {lows[i], lows[i] + penalty};
    return out;
}

IidBounds iid_bounds(const PeripheralDecomposition& per_copy_decomp, double kappa, double mu,
                     long m, double eps, long n) {
    if (m < 1) throw std::invalid_argument("iid_bounds: m must be >= 1");
    IidBounds out;
    out.m = m;
    out.n = n;
    out.epsilon = eps;
    out.delta_used = static_cast<double>(m) * kappa * std::pow(mu, static_cast<double>(n));
    const auto lows = lower_bounds(per_copy_decomp);
    const bool valid = eps + out.delta_used < 1.0;
    const double penalty = valid ? -std::log2(1.0 - eps - out.delta_used) : 0.0;
    for (int i = 0; i < 4; ++i) {
        out.total[i].lower = static_cast<double>(m) * lows[i];
        out.per_copy[i].lower = lows[i];
        out.total[i].valid = out.per_copy[i].valid = valid;
        if (valid) {
            out.total[i].upper = out.total[i].lower + penalty;
            out.per_copy[i].upper = lows[i] + penalty / static_cast<double>(m);
        }
    }
    return out;
}

long convergence_time(double kappa, double mu, double delta_target) {
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("convergence_time: need 0 < mu < 1");
    if (kappa <= 0.0) throw std::invalid_argument("convergence_time: need kappa > 0");
    if (delta_target <= 0.0)
        throw std::invalid_argument("convergence_time: need delta_target > 0");
    if (kappa * mu <= delta_target) return 1;
    const double raw = std::log(delta_target / kappa) / std::log(mu);
    long n = static_cast<long>(std::ceil(raw - 1e-12));
    while (kappa * std::pow(mu, static_cast<double>(n)) > delta_target) ++n;
    while (n > 1 && kappa * std::pow(mu, static_cast<double>(n - 1)) <= delta_target) --n;
    return n;
}

}  // namespace qms
