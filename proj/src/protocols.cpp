#include "qms/protocols.hpp"

#include "qms/divergences.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qms {

namespace {

CMat mat_int_pow(const CMat& m, int p) {
    CMat acc = CMat::Identity(m.rows(), m.cols());
    for (int i = 0; i < p; ++i) acc = acc * m;
    return acc;
}

}  // namespace

CMat hw_shift(int d) {
    CMat x = CMat::Zero(d, d);
    for (int i = 0; i < d; ++i) x((i + 1) % d, i) = 1.0;
    return x;
}

CMat hw_clock(int d) {
    CMat z = CMat::Zero(d, d);
    for (int i = 0; i < d; ++i)
        z(i, i) = std::polar(1.0, 2.0 * M_PI * static_cast<double>(i) / d);
    return z;
}

// ===========================================================================
// Quantum code
// ===========================================================================

QuantumCode build_quantum_code(const Channel& phi, const AsymptoticPart& asym,
                               const PeripheralDecomposition& decomp) {
    if (decomp.blocks.empty()) throw protocol_error("build_quantum_code: empty decomposition");
    int kstar = 0;
    for (std::size_t k = 1; k < decomp.blocks.size(); ++k)
        if (decomp.blocks[k].d > decomp.blocks[kstar].d) kstar = static_cast<int>(k);

    const auto& blk = decomp.blocks[kstar];
    QuantumCode code;
    code.block_index = kstar;
    code.code_dim = blk.d;
    code.rate_bits = std::log2(static_cast<double>(blk.d));
    code.isometry = blk.isometry;
    code.proj_superop = asym.proj_p.superop;

    // encoder rho -> W (rho (x) delta) W^dag
    const int d = phi.dim_in;
    const int dc = blk.d;
    CMat senc(static_cast<long>(d) * d, static_cast<long>(dc) * dc);
    for (int j = 0; j < dc; ++j)
        for (int i = 0; i < dc; ++i) {
            CMat e = CMat::Zero(dc, dc);
            e(i, j) = 1.0;
            senc.col(i + static_cast<long>(dc) * j) =
                vec(CMat(blk.isometry * kron(e, blk.delta) * blk.isometry.adjoint()));
        }
    code.encoder = channel_from_superop(senc, dc, d);

    // orthonormal basis of vec(chi) and the action of Phi restricted to it
    const auto basis = peripheral_basis(asym);
    const int dim_chi = static_cast<int>(basis.size());
    code.chi_basis_vecs = CMat(static_cast<long>(d) * d, dim_chi);
    for (int r = 0; r < dim_chi; ++r) code.chi_basis_vecs.col(r) = vec(basis[r]);
    code.chi_action = code.chi_basis_vecs.adjoint() * phi.superop * code.chi_basis_vecs;
    Eigen::JacobiSVD<CMat> csvd(code.chi_action);
    code.chi_cond = csvd.singularValues()(0) / csvd.singularValues().minCoeff();
    if (!(code.chi_cond < 1e8))
        throw protocol_error("build_quantum_code: restriction of Phi to chi has condition number " +
                             std::to_string(code.chi_cond));
    return code;
}

Channel quantum_decoder(const QuantumCode& code, long n, bool sabotage) {
    const int d = static_cast<int>(code.isometry.rows());
    const int dc = code.code_dim;
    const long dsq = static_cast<long>(d) * d;
    const int dim_chi = static_cast<int>(code.chi_basis_vecs.cols());

    // (Phi|chi)^{-n} by repeated squaring of the inverse
    CMat kmat = CMat::Identity(dim_chi, dim_chi);
    if (!sabotage) {
        CMat base = code.chi_action.inverse();
        long m = n;
        while (m > 0) {
            if (m & 1) kmat = kmat * base;
            m >>= 1;
            if (m > 0) base = base * base;
        }
    }
    const CMat sraw = code.chi_basis_vecs * kmat * code.chi_basis_vecs.adjoint() * code.proj_superop;

    // extraction map Y -> Tr_2(W^dag Y W)
    CMat sext(static_cast<long>(dc) * dc, dsq);
    const int mdim = static_cast<int>(code.isometry.cols()) / dc;
    for (long col = 0; col < dsq; ++col) {
        CVec e = CVec::Zero(dsq);
        e(col) = 1.0;
        const CMat y = unvec(e, d, d);
        sext.col(col) = vec(partial_trace(code.isometry.adjoint() * y * code.isometry,
                                          {dc, mdim}, {0}));
    }

    // completion: route weight missed by the code block to the mixed state
    const CMat pblk = code.isometry * code.isometry.adjoint();
    const CVec ew = vec(CMat::Identity(d, d)) - sraw.adjoint() * vec(pblk);
    const CMat sigma = CMat::Identity(dc, dc) / static_cast<double>(dc);
    const CMat scomp = vec(sigma) * ew.adjoint();

    try {
        return channel_from_superop(sext * sraw + scomp, d, dc);
    } catch (const cptp_error& e) {
        throw protocol_error(std::string("quantum_decoder: assembled decoder failed CPTP "
                                         "validation (chi condition ") +
                             std::to_string(code.chi_cond) + "): " + e.what());
    }
}

ProtocolEvalReport eval_quantum_code(const QuantumCode& code, const Channel& phi, long n,
                                     bool sabotage, double tol) {
    const Channel dec = quantum_decoder(code, n, sabotage);
    const Channel phin = channel_power(phi, n);
    const CMat total = dec.superop * phin.superop * code.encoder.superop;
    const CMat choi = superop_to_choi(total, code.code_dim, code.code_dim);
    const CMat ident = identity_channel(code.code_dim).choi;
    ProtocolEvalReport rep;
    rep.n = n;
    rep.tolerance = tol;
    rep.worst_error = trace_norm(choi - ident);
    rep.pass = rep.worst_error <= tol;
    return rep;
}

// ===========================================================================
// Shared support machinery
// ===========================================================================

namespace {

// Orthonormal support basis of a PSD matrix (relative eigenvalue threshold).
CMat state_support(const CMat& rho, double rel_tol = 1e-9) {
    Eigen::SelfAdjointEigenSolver<CMat> es((rho + rho.adjoint()) / 2.0);
    const double top = es.eigenvalues().maxCoeff();
    int first = 0;
    while (first < es.eigenvalues().size() && es.eigenvalues()(first) <= rel_tol * top) ++first;
    return es.eigenvectors().rightCols(es.eigenvalues().size() - first);
}

// POVM from per-message supports: verifies pairwise orthogonality, rotates the
// tiny residual overlaps away with a global Gram-Schmidt, and completes the
// first element. Throws on overlap above ortho_tol.
std::vector<CMat> supports_to_povm(const std::vector<CMat>& supports, double ortho_tol) {
    const int d = static_cast<int>(supports.at(0).rows());
    for (std::size_t a = 0; a < supports.size(); ++a)
        for (std::size_t b = a + 1; b < supports.size(); ++b) {
            const double olap = (supports[a].adjoint() * supports[b]).norm();
            if (olap > ortho_tol)
                throw protocol_error("evolved signal supports overlap by " + std::to_string(olap));
        }
    std::vector<CMat> povm;
    CMat accum(d, 0);   // previously used directions
    for (const CMat& sup : supports) {
        CMat v = sup;
        if (accum.cols() > 0) v -= accum * (accum.adjoint() * v);
        Eigen::HouseholderQR<CMat> qr(v);
        CMat q = CMat(qr.householderQ()).leftCols(v.cols());
        povm.push_back(q * q.adjoint());
        CMat grown(d, accum.cols() + q.cols());
        grown << accum, q;
        accum = std::move(grown);
    }
    CMat total = CMat::Zero(d, d);
    for (const CMat& e : povm) total += e;
    povm[0] += CMat::Identity(d, d) - total;
    return povm;
}

}  // namespace

// ===========================================================================
// Classical code
// ===========================================================================

ClassicalCode build_classical_code(const PeripheralDecomposition& decomp) {
    ClassicalCode code;
    for (std::size_t k = 0; k < decomp.blocks.size(); ++k) {
        const auto& blk = decomp.blocks[k];
        for (int i = 0; i < blk.d; ++i) {
            CMat e = CMat::Zero(blk.d, blk.d);
            e(i, i) = 1.0;
            code.states.push_back(blk.isometry * kron(e, blk.delta) * blk.isometry.adjoint());
            code.block_of.push_back(static_cast<int>(k));
        }
    }
    code.message_count = static_cast<int>(code.states.size());
    code.rate_bits = std::log2(static_cast<double>(code.message_count));
    return code;
}

std::vector<CMat> classical_povm(const ClassicalCode& code, const Channel& phi, long n) {
    const Channel phin = channel_power(phi, n);
    std::vector<CMat> supports;
    supports.reserve(code.states.size());
    for (const CMat& rho : code.states) supports.push_back(state_support(apply_channel(phin, rho)));
    return supports_to_povm(supports, 1e-9);
}

ProtocolEvalReport eval_classical_code(const ClassicalCode& code, const Channel& phi, long n,
                                       double tol) {
    const Channel phin = channel_power(phi, n);
    const auto povm = classical_povm(code, phi, n);
    ProtocolEvalReport rep;
    rep.n = n;
    rep.tolerance = tol;
    for (std::size_t m = 0; m < code.states.size(); ++m) {
        const double p = (povm[m] * apply_channel(phin, code.states[m])).trace().real();
        rep.worst_error = std::max(rep.worst_error, 1.0 - p);
    }
    rep.pass = rep.worst_error <= tol;
    return rep;
}

// ===========================================================================
// Entanglement-assisted code
// ===========================================================================

EACode build_ea_code(const PeripheralDecomposition& decomp) {
    EACode code;
    code.blocks = decomp.blocks;
    code.ref_dim = 1;
    for (const auto& b : decomp.blocks) code.ref_dim *= b.d;
    int total = 0;
    for (std::size_t k = 0; k < decomp.blocks.size(); ++k) {
        const int dk = decomp.blocks[k].d;
        for (int a = 0; a < dk; ++a)
            for (int b = 0; b < dk; ++b)
                code.messages.push_back({static_cast<int>(k), a, b});
        total += dk * dk;
    }
    code.message_count = total;
    code.rate_bits = std::log2(static_cast<double>(total));
    return code;
}

std::vector<CMat> ea_signals(const EACode& code, const Channel& phi, long n) {
    const Channel phin = channel_power(phi, n);
    const int nb = static_cast<int>(code.blocks.size());
    std::vector<CMat> out;
    out.reserve(code.messages.size());
    for (const EAMessage& msg : code.messages) {
        const auto& blk = code.blocks[msg.block];
        const int dk = blk.d;
        const CMat twist = mat_int_pow(hw_shift(dk), msg.shift) *
                           mat_int_pow(hw_clock(dk), msg.phase);

        // spectator reference registers are maximally mixed
        CMat left = CMat::Identity(1, 1);
        for (int j = 0; j < msg.block; ++j) {
            const int dj = code.blocks[j].d;
            left = kron(left, CMat::Identity(dj, dj) / static_cast<double>(dj));
        }
        CMat right = CMat::Identity(1, 1);
        for (int j = msg.block + 1; j < nb; ++j) {
            const int dj = code.blocks[j].d;
            right = kron(right, CMat::Identity(dj, dj) / static_cast<double>(dj));
        }
        // assemble ref_1 ... ref_K (x) A with the entangled pair at position msg.block;
        // reorder (left (x) [ref_k (x) A]) so A sits last: kron(left, piece') with
        // piece' = ref_k (x) right (x) A requires moving `right` inside; do it by
        // building piece on [ref_k (x) right (x) A] directly.
        CMat piece_full = CMat::Zero(static_cast<long>(dk) * right.rows() * phi.dim_in,
                                     static_cast<long>(dk) * right.rows() * phi.dim_in);
        for (int i = 0; i < dk; ++i)
            for (int j = 0; j < dk; ++j) {
                CMat e = CMat::Zero(dk, dk);
                e(i, j) = 1.0;
                const CMat twisted = blk.isometry *
                                     kron(CMat(twist * e * twist.adjoint()), blk.delta) *
                                     blk.isometry.adjoint();
                piece_full += kron(kron(e, right), apply_channel(phin, twisted)) / static_cast<double>(dk);
            }
        out.push_back(kron(left, piece_full));
    }
    return out;
}

CMat ea_signal_gram(const EACode& code, const Channel& phi, long n) {
    const auto sig = ea_signals(code, phi, n);
    const int m = static_cast<int>(sig.size());
    CMat gram(m, m);
    std::vector<double> norms(m);
    for (int i = 0; i < m; ++i) norms[i] = std::sqrt(std::abs(hs_inner(sig[i], sig[i]).real()));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) gram(i, j) = hs_inner(sig[i], sig[j]) / (norms[i] * norms[j]);
    return gram;
}

ProtocolEvalReport eval_ea_code(const EACode& code, const Channel& phi, long n, double tol) {
    const auto sig = ea_signals(code, phi, n);
    std::vector<CMat> supports;
    supports.reserve(sig.size());
    for (const CMat& s : sig) supports.push_back(state_support(s));
    const auto povm = supports_to_povm(supports, 1e-9);
    ProtocolEvalReport rep;
    rep.n = n;
    rep.tolerance = tol;
    for (std::size_t m = 0; m < sig.size(); ++m) {
        const double p = (povm[m] * sig[m]).trace().real();
        rep.worst_error = std::max(rep.worst_error, 1.0 - p);
    }
    rep.pass = rep.worst_error <= tol;
    return rep;
}

// ===========================================================================
// Private code from a quantum code
// ===========================================================================

std::pair<PrivateCode, ProtocolEvalReport> private_from_quantum(const QuantumCode& code,
                                                                const Channel& phi, long n,
                                                                double tol) {
    const int d = phi.dim_in;
    const int dc = code.code_dim;
    const Channel dec = quantum_decoder(code, n, false);
    const Channel phin = channel_power(phi, n);

    PrivateCode priv;
    priv.message_count = dc;
    priv.rate_bits = std::log2(static_cast<double>(dc));
    for (int m = 0; m < dc; ++m) {
        CMat e = CMat::Zero(dc, dc);
        e(m, m) = 1.0;
        priv.states.push_back(apply_channel(code.encoder, e));
        // POVM element D_n^*(|m><m|); the adjoint of a channel is unital, so
        // these sum to the identity.
        priv.povm.push_back(unvec(CVec(dec.superop.adjoint() * vec(e)), d, d));
    }

    ProtocolEvalReport rep;
    rep.n = n;
    rep.tolerance = tol;
    for (int m = 0; m < dc; ++m) {
        const double p = (priv.povm[m] * apply_channel(phin, priv.states[m])).trace().real();
        rep.worst_error = std::max(rep.worst_error, 1.0 - p);
    }

    // environment independence through the complementary channel of Phi^n
    const Channel comp = complementary(phin);
    std::vector<CMat> env;
    env.reserve(dc);
    for (const CMat& rho : priv.states) env.push_back(apply_channel(comp, rho));
    rep.env_fidelity = 1.0;
    for (int a = 0; a < dc; ++a)
        for (int b = a + 1; b < dc; ++b) {
            const double f = fidelity(env[a], env[b]);
            if (f < rep.env_fidelity) {
                rep.env_fidelity = f;
                rep.worst_pair_a = a;
                rep.worst_pair_b = b;
            }
        }
    rep.pass = rep.worst_error <= tol && rep.env_fidelity >= 1.0 - tol;
    return {std::move(priv), rep};
}

}  // namespace qms
