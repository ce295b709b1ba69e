#include "qms/structure.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qms {

namespace {

// Eigenvalue clusters of a Hermitian matrix at an absolute gap tolerance.
// Returns (value, orthonormal eigenvector block) pairs sorted by value.
std::vector<std::pair<double, CMat>> hermitian_clusters(const CMat& h, double tol) {
    Eigen::SelfAdjointEigenSolver<CMat> es((h + h.adjoint()) / 2.0);
    const RVec vals = es.eigenvalues();
    std::vector<std::pair<double, CMat>> out;
    int start = 0;
    for (int i = 1; i <= vals.size(); ++i) {
        if (i == vals.size() || vals(i) - vals(i - 1) > tol) {
            out.emplace_back(vals.segment(start, i - start).mean(),
                             es.eigenvectors().middleCols(start, i - start));
            start = i;
        }
    }
    return out;
}

}  // namespace

std::vector<CMat> peripheral_basis(const AsymptoticPart& asym, double sv_tol) {
    const CMat& sp = asym.proj_p.superop;
    Eigen::JacobiSVD<CMat> svd(sp, Eigen::ComputeThinU);
    const RVec sv = svd.singularValues();
    const double top = sv(0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > sv_tol * top) ++rank;
    if (rank == 0) throw structure_error("peripheral_basis: projector has no range");
    if (rank < sv.size()) {
        // stability: require a 10x gap between retained and discarded values
        const double kept = sv(rank - 1), dropped = sv(rank);
        if (dropped > kept / 10.0)
            throw structure_error("peripheral_basis: unstable rank decision (gap " +
                                  std::to_string(kept / std::max(dropped, 1e-300)) + "x)");
    }
    const int d = asym.proj_p.dim_in;
    std::vector<CMat> basis;
    basis.reserve(rank);
    for (int r = 0; r < rank; ++r) basis.push_back(unvec(svd.matrixU().col(r), d, d));
    return basis;
}

PeripheralDecomposition block_decompose(const AsymptoticPart& asym,
                                        const std::vector<CMat>& basis,
                                        std::uint64_t seed) {
    const int d = asym.proj_p.dim_in;
    const int chi_dim = static_cast<int>(basis.size());
    if (chi_dim == 0) throw structure_error("block_decompose: empty peripheral basis");

    PeripheralDecomposition out;
    out.dim_total = d;
    out.seed = seed;

    // -- support of sigma = P(I/d) gives H_0-perp -----------------------------
    const CMat sigma = apply_channel(asym.proj_p, CMat(CMat::Identity(d, d) / static_cast<double>(d)));
    Eigen::SelfAdjointEigenSolver<CMat> ses((sigma + sigma.adjoint()) / 2.0);
    const double smax = ses.eigenvalues().maxCoeff();
    int first = 0;
    while (first < d && ses.eigenvalues()(first) <= 1e-8 * smax) ++first;
    if (first > 0 && first < d) {
        const double kept = ses.eigenvalues()(first), dropped = ses.eigenvalues()(first - 1);
        if (dropped > kept / 10.0)
            throw structure_error("block_decompose: unstable H0 support decision");
    }
    const int p = d - first;   // dim of H_0-perp
    out.dim_h0 = d - p;
    const CMat v0 = ses.eigenvectors().rightCols(p);
    out.h0perp_isometry = v0;

    // -- compressed projector P-bar on B(H_0-perp) and its adjoint -----------
    CMat sbar(static_cast<long>(p) * p, static_cast<long>(p) * p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i) {
            CMat e = CMat::Zero(p, p);
            e(i, j) = 1.0;
            const CMat img = v0.adjoint() * apply_channel(asym.proj_p, CMat(v0 * e * v0.adjoint())) * v0;
            sbar.col(i + static_cast<long>(p) * j) = vec(img);
        }

    // fixed points of the adjoint: null space of (S-bar^dag - I)
    const CMat fx = sbar.adjoint() - CMat::Identity(sbar.rows(), sbar.cols());
    Eigen::JacobiSVD<CMat> fsvd(fx, Eigen::ComputeFullV);
    const RVec fsv = fsvd.singularValues();
    int fdim = 0;
    for (int i = static_cast<int>(fsv.size()) - 1; i >= 0; --i) {
        if (fsv(i) < 1e-7) ++fdim;
        else break;
    }
    if (fdim != chi_dim)
        throw structure_error("block_decompose: fixed-point algebra dimension " +
                              std::to_string(fdim) + " != peripheral dimension " +
                              std::to_string(chi_dim));
    std::vector<CMat> alg;   // basis of F = (+)_k B(H_{k,1}) (x) 1
    alg.reserve(fdim);
    for (int i = 0; i < fdim; ++i)
        alg.push_back(unvec(fsvd.matrixV().col(fsv.size() - 1 - i), p, p));

    // -- split F by a random Hermitian element of its center ------------------
    // center conditions: [Y, F_r] = 0 for all basis elements, Y in F
    CMat commat(static_cast<long>(fdim) * p * p, fdim);
    for (int j = 0; j < fdim; ++j)
        for (int r = 0; r < fdim; ++r) {
            const CMat comm = alg[j] * alg[r] - alg[r] * alg[j];
            commat.block(static_cast<long>(r) * p * p, j, static_cast<long>(p) * p, 1) = vec(comm);
        }
    Eigen::JacobiSVD<CMat> csvd(commat, Eigen::ComputeFullV);
    int cdim = 0;
    for (int i = static_cast<int>(csvd.singularValues().size()) - 1; i >= 0; --i) {
        if (csvd.singularValues()(i) < 1e-7) ++cdim;
        else break;
    }
    if (cdim < 1) throw structure_error("block_decompose: empty center");
    const int num_blocks = cdim;

    Rng rng(seed);
    std::vector<std::pair<double, CMat>> block_spaces;   // (marker, support basis)
    bool split_ok = false;
    for (int attempt = 0; attempt < 3 && !split_ok; ++attempt) {
        CMat z = CMat::Zero(p, p);
        for (int c = 0; c < cdim; ++c) {
            // center element expressed in the algebra basis coordinates
            const CVec coord = csvd.matrixV().col(csvd.singularValues().size() - 1 - c);
            CMat zc = CMat::Zero(p, p);
            for (int j = 0; j < fdim; ++j) zc += coord(j) * alg[j];
            z += Cplx(rng.normal(), rng.normal()) * zc;
        }
        z = ((z + z.adjoint()) / 2.0).eval();
        const double scale = std::max(1.0, z.norm());
        auto clusters = hermitian_clusters(z, 1e-6 * scale);
        if (static_cast<int>(clusters.size()) == num_blocks) {
            block_spaces = std::move(clusters);
            split_ok = true;
        }
    }
    if (!split_ok)
        throw structure_error("block_decompose: degenerate central element after 3 retries");

    // -- factor each block into H_{k,1} (x) H_{k,2} ---------------------------
    for (int k = 0; k < num_blocks; ++k) {
        const CMat& bk = block_spaces[k].second;   // p x q, orthonormal
        const int q = static_cast<int>(bk.cols());

        int dk = 0, mk = 0;
        std::vector<std::pair<double, CMat>> eigspaces;
        bool factored = false;
        for (int attempt = 0; attempt < 3 && !factored; ++attempt) {
            CMat g = CMat::Zero(p, p);
            for (int r = 0; r < fdim; ++r) g += Cplx(rng.normal(), rng.normal()) * alg[r];
            g = ((g + g.adjoint()) / 2.0).eval();
            const CMat gk = bk.adjoint() * g * bk;
            const double scale = std::max(1.0, gk.norm());
            eigspaces = hermitian_clusters(gk, 1e-6 * scale);
            dk = static_cast<int>(eigspaces.size());
            if (q % dk != 0) continue;
            mk = q / dk;
            bool equal = true;
            for (const auto& [val, vecs] : eigspaces)
                if (static_cast<int>(vecs.cols()) != mk) equal = false;
            factored = equal;
        }
        if (!factored)
            throw structure_error("block_decompose: tensor factorization failed in block " +
                                  std::to_string(k));

        // consistent second-factor bases via a connecting algebra element
        CMat w = CMat::Zero(q, q);   // columns ordered (i * mk + j)
        w.block(0, 0, q, mk) = eigspaces[0].second;
        if (dk > 1) {
            bool connected = false;
            for (int attempt = 0; attempt < 5 && !connected; ++attempt) {
                CMat rrand = CMat::Zero(p, p);
                for (int r = 0; r < fdim; ++r)
                    rrand += Cplx(rng.normal(), rng.normal()) * alg[r];
                const CMat rk = bk.adjoint() * rrand * bk;
                connected = true;
                for (int i = 1; i < dk; ++i) {
                    CMat ci = eigspaces[i].second.adjoint() * rk * eigspaces[0].second;  // mk x mk
                    Eigen::JacobiSVD<CMat> csvd2(ci, Eigen::ComputeFullU | Eigen::ComputeFullV);
                    if (csvd2.singularValues().minCoeff() < 1e-6) {
                        connected = false;
                        break;
                    }
                    const CMat unit = csvd2.matrixU() * csvd2.matrixV().adjoint();  // polar factor
                    w.block(0, static_cast<long>(i) * mk, q, mk) = eigspaces[i].second * unit;
                }
            }
            if (!connected)
                throw structure_error("block_decompose: could not connect eigenspaces in block " +
                                      std::to_string(k));
        }

        PeripheralBlock blk;
        blk.d = dk;
        blk.m = mk;
        blk.isometry = v0 * bk * w;   // H_{k,1} (x) H_{k,2} -> H_A

        // delta_k from the block content of sigma (any chi element is x (x) delta)
        CMat inblock = blk.isometry.adjoint() * sigma * blk.isometry;
        CMat delta = partial_trace(inblock, {dk, mk}, {1});
        delta = ((delta + delta.adjoint()) / 2.0).eval();
        const double tr = delta.trace().real();
        if (tr <= 0) throw structure_error("block_decompose: block with nonpositive weight");
        blk.delta = delta / tr;
        Eigen::SelfAdjointEigenSolver<CMat> des(blk.delta);
        if (des.eigenvalues().minCoeff() <= 1e-10)
            throw structure_error("block_decompose: delta_k not positive definite (min eig " +
                                  std::to_string(des.eigenvalues().minCoeff()) + ")");
        out.blocks.push_back(std::move(blk));
    }

    // -- canonical order: decreasing d, then support position -----------------
    auto support_key = [d](const PeripheralBlock& b) {
        const CMat proj = b.isometry * b.isometry.adjoint();
        std::vector<double> diag(d);
        for (int i = 0; i < d; ++i) diag[i] = proj(i, i).real();
        return diag;
    };
    std::vector<std::vector<double>> keys;
    keys.reserve(out.blocks.size());
    for (const auto& b : out.blocks) keys.push_back(support_key(b));
    std::vector<int> order(out.blocks.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (out.blocks[a].d != out.blocks[b].d) return out.blocks[a].d > out.blocks[b].d;
        if (out.blocks[a].m != out.blocks[b].m) return out.blocks[a].m > out.blocks[b].m;
        for (int i = 0; i < d; ++i) {
            const double diff = keys[a][i] - keys[b][i];
            if (std::abs(diff) > 1e-9) return diff > 0;
        }
        return false;
    });
    std::vector<PeripheralBlock> sorted;
    sorted.reserve(out.blocks.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.push_back(std::move(out.blocks[order[i]]));
        sorted.back().index = static_cast<int>(i);
    }
    out.blocks = std::move(sorted);

    // dimension audit
    int sum_dm = 0, sum_dsq = 0;
    for (const auto& b : out.blocks) {
        sum_dm += b.d * b.m;
        sum_dsq += b.d * b.d;
    }
    if (out.dim_h0 + sum_dm != d)
        throw structure_error("block_decompose: dimension audit failed (h0 + sum d*m != d)");
    if (sum_dsq != chi_dim)
        throw structure_error("block_decompose: sum d_k^2 != dim chi");

    // flag non-uniqueness: equal-shape blocks with coinciding delta spectra
    for (std::size_t a = 0; a + 1 < out.blocks.size(); ++a)
        for (std::size_t b = a + 1; b < out.blocks.size(); ++b) {
            const auto& x = out.blocks[a];
            const auto& y = out.blocks[b];
            if (x.d == y.d && x.m == y.m && trace_norm(x.delta - y.delta) < 1e-8)
                out.canonical_not_unique = true;
        }
    return out;
}

void recover_action(const Channel& phi, PeripheralDecomposition& decomp) {
    const int nb = static_cast<int>(decomp.blocks.size());
    decomp.pi.assign(nb, -1);

    // block projectors in the ambient space
    std::vector<CMat> pblock;
    pblock.reserve(nb);
    for (const auto& b : decomp.blocks) pblock.push_back(b.isometry * b.isometry.adjoint());

    // locate pi by sending each block's embedded maximally mixed chi element
    std::vector<int> target_of(nb, -1);   // input j -> output block
    for (int j = 0; j < nb; ++j) {
        const auto& b = decomp.blocks[j];
        const CMat probe = b.isometry *
                           kron(CMat::Identity(b.d, b.d) / static_cast<double>(b.d), b.delta) *
                           b.isometry.adjoint();
        const CMat img = apply_channel(phi, probe);
        for (int k = 0; k < nb; ++k) {
            const double wt = (pblock[k] * img * pblock[k]).trace().real();
            if (wt > 1.0 - 1e-6) {
                target_of[j] = k;
                break;
            }
        }
        if (target_of[j] < 0)
            throw structure_error("recover_action: block image not localized in a single block");
    }
    for (int j = 0; j < nb; ++j) {
        const int k = target_of[j];
        if (decomp.pi[k] != -1)
            throw structure_error("recover_action: block routing is not a permutation");
        decomp.pi[k] = j;
        if (decomp.blocks[k].d != decomp.blocks[j].d)
            throw structure_error("recover_action: permutation mixes unequal block dimensions");
    }

    // fit U_k: the map x -> Tr_2[ W_k^dag Phi(W_j (x (x) delta_j) W_j^dag) W_k ]
    // equals x -> U_k^dag x U_k; recover U_k from the realigned superoperator.
    for (int k = 0; k < nb; ++k) {
        const int j = decomp.pi[k];
        const auto& src = decomp.blocks[j];
        auto& dst = decomp.blocks[k];
        const int dd = dst.d;
        CMat sop(static_cast<long>(dd) * dd, static_cast<long>(dd) * dd);
        for (int col = 0; col < dd; ++col)
            for (int row = 0; row < dd; ++row) {
                CMat e = CMat::Zero(dd, dd);
                e(row, col) = 1.0;
                const CMat inp = src.isometry * kron(e, src.delta) * src.isometry.adjoint();
                const CMat outm = dst.isometry.adjoint() * apply_channel(phi, inp) * dst.isometry;
                sop.col(row + static_cast<long>(dd) * col) = vec(partial_trace(outm, {dd, dst.m}, {0}));
            }
        // sop = conj(U)^T ... for y = U^dag x U: vec(y) = (U^T (x) U^dag) vec(x);
        // realign so the result is rank one: R[(i,kk),(jj,l)] = sop[(i,jj),(kk,l)]
        CMat realigned(static_cast<long>(dd) * dd, static_cast<long>(dd) * dd);
        for (int i = 0; i < dd; ++i)
            for (int jj = 0; jj < dd; ++jj)
                for (int kk = 0; kk < dd; ++kk)
                    for (int l = 0; l < dd; ++l)
                        realigned(i + static_cast<long>(dd) * kk, jj + static_cast<long>(dd) * l) =
                            sop(i + static_cast<long>(dd) * jj, kk + static_cast<long>(dd) * l);
        Eigen::JacobiSVD<CMat> rsvd(realigned, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (rsvd.singularValues().size() > 1 &&
            rsvd.singularValues()(1) > 1e-7 * rsvd.singularValues()(0))
            throw structure_error("recover_action: block action is not a pure unitary conjugation");
        // leading left singular vector unvecs to U^dag up to scale/phase
        CVec uvec = rsvd.matrixU().col(0) * rsvd.singularValues()(0);
        CMat u = unvec(uvec, dd, dd).adjoint();
        // normalize to a unitary and fix the global phase
        Eigen::JacobiSVD<CMat> usvd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
        u = usvd.matrixU() * usvd.matrixV().adjoint();
        Eigen::Index mr = 0, mc = 0;
        u.cwiseAbs().maxCoeff(&mr, &mc);
        u *= std::conj(u(mr, mc)) / std::abs(u(mr, mc));
        dst.unitary = u;
    }

    decomp.residual = phaseaction_residual(phi, decomp);
    if (decomp.residual > 1e-7)
        throw structure_error("recover_action: action residual " +
                              std::to_string(decomp.residual) + " exceeds 1e-7");
}

double phaseaction_residual(const Channel& phi, const PeripheralDecomposition& decomp) {
    double worst = 0.0;
    const int nb = static_cast<int>(decomp.blocks.size());
    for (int j = 0; j < nb; ++j) {
        // find k with pi(k) = j
        int k = 0;
        while (k < nb && decomp.pi[k] != j) ++k;
        const auto& src = decomp.blocks[j];
        const auto& dst = decomp.blocks[k];
        for (int col = 0; col < src.d; ++col)
            for (int row = 0; row < src.d; ++row) {
                CMat e = CMat::Zero(src.d, src.d);
                e(row, col) = 1.0;
                const CMat inp = src.isometry * kron(e, src.delta) * src.isometry.adjoint();
                const CMat expect = dst.isometry *
                                    kron(CMat(dst.unitary.adjoint() * e * dst.unitary), dst.delta) *
                                    dst.isometry.adjoint();
                worst = std::max(worst, trace_norm(apply_channel(phi, inp) - expect));
            }
    }
    return worst;
}

Channel restrict_away_h0(const AsymptoticPart& asym, const PeripheralDecomposition& decomp,
                         bool* noop) {
    const CMat& v0 = decomp.h0perp_isometry;
    const int p = static_cast<int>(v0.cols());
    if (noop) *noop = (decomp.dim_h0 == 0);
    CMat sbar(static_cast<long>(p) * p, static_cast<long>(p) * p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i) {
            CMat e = CMat::Zero(p, p);
            e(i, j) = 1.0;
            sbar.col(i + static_cast<long>(p) * j) =
                vec(CMat(v0.adjoint() * apply_channel(asym.proj_p, CMat(v0 * e * v0.adjoint())) * v0));
        }
    return channel_from_superop(sbar, p, p, 1e-8);
}

Analysis analyze_channel(const Channel& phi, double tol, std::uint64_t seed) {
    Analysis a;
    a.channel = phi;
    a.spectrum = analyze_spectrum(phi, tol);
    a.asym = asymptotic_part(phi, a.spectrum);
    a.mu = spectral_gap_mu(phi, a.asym);
    const auto basis = peripheral_basis(a.asym);
    a.decomp = block_decompose(a.asym, basis, seed);
    recover_action(phi, a.decomp);
    return a;
}

}  // namespace qms
