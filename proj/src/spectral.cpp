#include "qms/spectral.hpp"

#include "qms/sdp.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qms {

namespace {

constexpr double kPeripheralBand = 1e-8;   // |lambda| >= 1 - band is peripheral
constexpr double kAmbiguousBand = 1e-6;

}  // namespace

SpectrumReport analyze_spectrum(const Channel& phi, double tol) {
    if (phi.dim_in != phi.dim_out)
        throw std::invalid_argument("analyze_spectrum: channel must be square");
    SpectrumReport rep;
    rep.tol = tol;
    rep.dim = phi.dim_in;

    EigOptions opts;
    opts.cluster_tol = tol;
    rep.detail = eig_general(phi.superop, opts);

    for (const EigCluster& c : rep.detail) {
        EigClusterInfo info;
        info.value = c.value;
        info.algebraic = c.algebraic;
        info.geometric = c.geometric;
        const double mag = std::abs(c.value);
        info.peripheral = mag >= 1.0 - kPeripheralBand;
        info.ambiguous = !info.peripheral && mag > 1.0 - kAmbiguousBand;
        if (info.peripheral) {
            rep.peripheral_count += c.algebraic;
            if (c.geometric != c.algebraic)
                throw std::runtime_error(
                    "analyze_spectrum: peripheral cluster looks defective (algebraic " +
                    std::to_string(c.algebraic) + ", geometric " + std::to_string(c.geometric) +
                    ")");
        }
        if (!info.peripheral) {
            if (c.geometric < c.algebraic) rep.has_nilpotent_nonperipheral = true;
            rep.mu = std::max(rep.mu, mag);
        }
        rep.clusters.push_back(info);
    }
    if (rep.mu < 1e-12) rep.mu = 0.0;

    // lambda = 1 must be present; all magnitudes <= 1 + tol
    bool has_one = false;
    for (const auto& c : rep.clusters) {
        if (std::abs(c.value - Cplx(1, 0)) <= 1e-7) has_one = true;
        if (std::abs(c.value) > 1.0 + 1e-7)
            throw std::runtime_error("analyze_spectrum: eigenvalue outside the unit disc");
    }
    if (!has_one) throw std::runtime_error("analyze_spectrum: missing eigenvalue 1");
    return rep;
}

// ===========================================================================
// Schur-form spectral projectors (fallback construction)
// ===========================================================================

namespace {

// Swap the adjacent diagonal entries i, i+1 of the triangular factor by a
// unitary similarity, updating t and q in place.
void schur_swap(CMat& t, CMat& q, int i) {
    const Cplx a = t(i, i), b = t(i, i + 1), c = t(i + 1, i + 1);
    CVec v(2);
    v << b, c - a;
    const double n = v.norm();
    if (n < 1e-300) {   // equal eigenvalues, nothing to move
        return;
    }
    v /= n;
    CMat g(2, 2);
    g << v(0), -std::conj(v(1)), v(1), std::conj(v(0));
    t.middleRows(i, 2) = g.adjoint() * t.middleRows(i, 2);
    t.middleCols(i, 2) = t.middleCols(i, 2) * g;
    q.middleCols(i, 2) = q.middleCols(i, 2) * g;
    t(i + 1, i) = 0.0;
}

// Spectral projector onto the invariant subspace of the selected diagonal
// positions of the Schur form m = q t q^dag.
CMat schur_projector(CMat t, CMat q, std::vector<char> selected) {
    const int n = static_cast<int>(t.rows());
    // bubble the selected eigenvalues to the leading positions
    bool moved = true;
    while (moved) {
        moved = false;
        for (int i = 0; i + 1 < n; ++i) {
            if (!selected[i] && selected[i + 1]) {
                schur_swap(t, q, i);
                std::swap(selected[i], selected[i + 1]);
                moved = true;
            }
        }
    }
    int k = 0;
    while (k < n && selected[k]) ++k;
    if (k == 0) return CMat::Zero(n, n);
    if (k == n) return CMat::Identity(n, n);

    // solve T11 R - R T22 = T12 column by column (both factors triangular)
    const CMat t11 = t.topLeftCorner(k, k);
    const CMat t22 = t.bottomRightCorner(n - k, n - k);
    const CMat t12 = t.topRightCorner(k, n - k);
    CMat r(k, n - k);
    for (int j = 0; j < n - k; ++j) {
        CVec rhs = t12.col(j);
        for (int l = 0; l < j; ++l) rhs += r.col(l) * t22(l, j);
        CMat lhs = t11 - t22(j, j) * CMat::Identity(k, k);
        r.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
    }

    CMat inblock = CMat::Zero(n, n);
    inblock.topLeftCorner(k, k) = CMat::Identity(k, k);
    inblock.topRightCorner(k, n - k) = r;
    return q * inblock * q.adjoint();
}

}  // namespace

AsymptoticPart asymptotic_part(const Channel& phi, const SpectrumReport& report) {
    const int d = phi.dim_in;
    const long dsq = static_cast<long>(d) * d;

    AsymptoticPart out;

    // primary route: biorthogonal projectors right * left^dag per cluster
    bool primary_ok = true;
    double worst_cond = 0.0;
    std::vector<std::pair<Cplx, CMat>> comps;
    for (std::size_t i = 0; i < report.clusters.size(); ++i) {
        if (!report.clusters[i].peripheral) continue;
        const EigCluster& c = report.detail[i];
        worst_cond = std::max(worst_cond, c.pairing_cond);
        if (!c.biorthogonal || c.pairing_cond > 1e8) {
            primary_ok = false;
            break;
        }
        comps.emplace_back(c.value, CMat(c.right * c.left.adjoint()));
    }
    out.projector_cond = worst_cond;

    auto assemble = [&](const std::vector<std::pair<Cplx, CMat>>& parts) {
        CMat sp = CMat::Zero(dsq, dsq);
        CMat si = CMat::Zero(dsq, dsq);
        for (const auto& [lam, proj] : parts) {
            sp += proj;
            si += lam * proj;
        }
        return std::make_pair(sp, si);
    };

    auto try_build = [&](const std::vector<std::pair<Cplx, CMat>>& parts,
                         AsymptoticPart& dst) -> bool {
        auto [sp, si] = assemble(parts);
        if ((sp * sp - sp).norm() > 1e-8 * std::max(1.0, sp.norm())) return false;
        try {
            dst.proj_p = channel_from_superop(sp, d, d, 1e-8);
            dst.phi_inf = channel_from_superop(si, d, d, 1e-8);
        } catch (const cptp_error&) {
            return false;
        }
        dst.components = parts;
        return true;
    };

    if (primary_ok && try_build(comps, out)) return out;

    // fallback: Schur invariant-subspace projectors, one per peripheral cluster
    Eigen::ComplexSchur<CMat> schur(phi.superop);
    if (schur.info() != Eigen::Success)
        throw std::runtime_error("asymptotic_part: Schur decomposition failed");
    const CMat t0 = schur.matrixT();
    const CMat q0 = schur.matrixU();

    std::vector<std::pair<Cplx, CMat>> comps2;
    for (std::size_t i = 0; i < report.clusters.size(); ++i) {
        if (!report.clusters[i].peripheral) continue;
        const Cplx lam = report.clusters[i].value;
        std::vector<char> sel(dsq, 0);
        int hits = 0;
        for (long j = 0; j < dsq; ++j)
            if (std::abs(t0(j, j) - lam) <= report.tol * 10.0 + 1e-12) {
                sel[j] = 1;
                ++hits;
            }
        if (hits != report.clusters[i].algebraic)
            throw std::runtime_error("asymptotic_part: Schur cluster matching failed");
        comps2.emplace_back(lam, schur_projector(t0, q0, sel));
    }
    AsymptoticPart fb;
    fb.used_schur_fallback = true;
    fb.projector_cond = worst_cond;
    if (!try_build(comps2, fb))
        throw std::runtime_error("asymptotic_part: projector assembly failed CPTP validation");
    return fb;
}

double spectral_gap_mu(const Channel& phi, const AsymptoticPart& asym) {
    const CMat n = phi.superop - asym.phi_inf.superop;
    if (n.norm() < 1e-12) return 0.0;
    Eigen::ComplexEigenSolver<CMat> es(n, false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectral_gap_mu: eigensolver failed");
    const double mu = es.eigenvalues().cwiseAbs().maxCoeff();
    return (mu < 1e-12) ? 0.0 : mu;
}

CMat deviation_superop(const Channel& phi, const AsymptoticPart& asym, long n) {
    if (n < 1) throw std::invalid_argument("deviation_superop: n must be >= 1");
    const long dsq = static_cast<long>(phi.dim_in) * phi.dim_in;
    // Phi^n by repeated squaring
    CMat acc = CMat::Identity(dsq, dsq);
    CMat base = phi.superop;
    long mm = n;
    while (mm > 0) {
        if (mm & 1) acc = acc * base;
        mm >>= 1;
        if (mm > 0) base = base * base;
    }
    // Phi_inf^n from the spectral form
    CMat inf_n = CMat::Zero(dsq, dsq);
    for (const auto& [lam, proj] : asym.components) inf_n += std::pow(lam, static_cast<double>(n)) * proj;
    return acc - inf_n;
}

double delta_n(const Channel& phi, const AsymptoticPart& asym, long n) {
    const CMat diff = deviation_superop(phi, asym, n);
    if (diff.norm() < 1e-13) return 0.0;
    return sdp::diamond_norm(diff, phi.dim_in, phi.dim_out, 1e-8);
}

std::vector<double> delta_sequence(const Channel& phi, const AsymptoticPart& asym,
                                   const std::vector<long>& ns, int workers) {
    if (workers <= 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<int>(workers, static_cast<int>(ns.size()));
    std::vector<double> out(ns.size(), 0.0);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::string first_error;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= ns.size()) return;
                try {
                    out[i] = delta_n(phi, asym, ns[i]);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (first_error.empty()) first_error = e.what();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw std::runtime_error("delta_sequence: " + first_error);
    return out;
}

KappaFit fit_kappa(const Channel& phi, const AsymptoticPart& asym,
                   const std::vector<long>& n_range) {
    if (n_range.empty()) throw std::invalid_argument("fit_kappa: empty n range");
    KappaFit fit;
    fit.mu = spectral_gap_mu(phi, asym);
    const std::vector<double> ds = delta_sequence(phi, asym, n_range);
    for (std::size_t i = 0; i < n_range.size(); ++i) fit.deltas.emplace_back(n_range[i], ds[i]);
    if (fit.mu == 0.0) {
        fit.kappa = 0.0;
        fit.exact_convergence = true;
        fit.slope_ok = true;
        return fit;
    }
    double kappa = 0.0;
    for (const auto& [n, dn] : fit.deltas)
        if (dn > 1e-11) kappa = std::max(kappa, dn / std::pow(fit.mu, static_cast<double>(n)));
    fit.kappa = kappa;

    // least-squares slope of log2 Delta_n over the tail of the range
    const long n_min = *std::min_element(n_range.begin(), n_range.end());
    const long n_max = *std::max_element(n_range.begin(), n_range.end());
    const long mid = (n_min + n_max) / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& [n, dn] : fit.deltas) {
        if (n < mid || dn < 1e-10) continue;
        const double x = static_cast<double>(n), y = std::log2(dn);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    fit.target_slope = std::log2(fit.mu);
    if (cnt >= 2) {
        fit.fitted_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        fit.slope_ok = std::abs(fit.fitted_slope / fit.target_slope - 1.0) <= 0.02;
    }
    return fit;
}

}  // namespace qms
