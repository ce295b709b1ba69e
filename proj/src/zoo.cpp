#include "qms/zoo.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qms {

Channel make_identity(int d) { return identity_channel(d); }

Channel make_depolarizing(int d) {
    // Kraus set { |i><j| / sqrt(d) }
    std::vector<CMat> kraus;
    kraus.reserve(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            CMat k = CMat::Zero(d, d);
            k(i, j) = 1.0 / std::sqrt(static_cast<double>(d));
            kraus.push_back(std::move(k));
        }
    return channel_from_kraus(std::move(kraus));
}

Channel make_pinching(const std::vector<int>& sizes) {
    const int d = std::accumulate(sizes.begin(), sizes.end(), 0);
    std::vector<CMat> kraus;
    int off = 0;
    for (int s : sizes) {
        CMat p = CMat::Zero(d, d);
        p.block(off, off, s, s) = CMat::Identity(s, s);
        kraus.push_back(std::move(p));
        off += s;
    }
    return channel_from_kraus(std::move(kraus));
}

Channel make_shift_dephase(int d) {
    // X -> S diag(X) S^dag with S the cyclic shift
    std::vector<CMat> kraus;
    for (int i = 0; i < d; ++i) {
        CMat k = CMat::Zero(d, d);
        k((i + 1) % d, i) = 1.0;
        kraus.push_back(std::move(k));
    }
    return channel_from_kraus(std::move(kraus));
}

Channel make_amplitude_damping(double gamma) {
    if (gamma < 0.0 || gamma > 1.0)
        throw std::invalid_argument("make_amplitude_damping: gamma must be in [0,1]");
    CMat k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    k1 << 0, std::sqrt(gamma), 0, 0;
    return channel_from_kraus({k0, k1});
}

Channel make_transient_qutrit() {
    CMat k0 = CMat::Zero(3, 3), k1 = CMat::Zero(3, 3);
    k0(0, 0) = k0(1, 1) = 1.0;
    k1(0, 2) = 1.0;
    return channel_from_kraus({k0, k1});
}

Channel make_unitary_phase(double theta) {
    CMat u = CMat::Identity(2, 2);
    u(1, 1) = std::polar(1.0, theta);
    return channel_from_kraus({u});
}

// ===========================================================================
// Random block channels
// ===========================================================================

ZooChannel make_random_block(const RandomBlockSpec& spec) {
    const int nb = static_cast<int>(spec.blocks.size());
    if (nb == 0) throw std::invalid_argument("make_random_block: no blocks");
    if (static_cast<int>(spec.pi.size()) != nb)
        throw std::invalid_argument("make_random_block: pi size mismatch");

    Rng rng(spec.seed);

    int sdim = 0;
    std::vector<int> offset(nb);
    for (int k = 0; k < nb; ++k) {
        offset[k] = sdim;
        sdim += spec.blocks[k].first * spec.blocks[k].second;
    }
    const int d = sdim + spec.dim_h0;

    // per-block data: positive definite deltas with a safe margin, unitaries
    std::vector<CMat> deltas(nb), units(nb), emb(nb);
    for (int k = 0; k < nb; ++k) {
        const auto [dk, mk] = spec.blocks[k];
        CMat delta = CMat::Identity(mk, mk) / static_cast<double>(mk) + 0.5 * random_density(mk, rng);
        delta /= delta.trace().real();
        deltas[k] = delta;
        units[k] = random_unitary(dk, rng);
        CMat w = CMat::Zero(sdim, dk * mk);
        w.block(offset[k], 0, dk * mk, dk * mk) = CMat::Identity(dk * mk, dk * mk);
        emb[k] = w;
    }
    for (int k = 0; k < nb; ++k)
        if (spec.blocks[k].first != spec.blocks[spec.pi[k]].first)
            throw std::invalid_argument("make_random_block: pi mixes unequal block dims");

    // structured channel on the block part: output block k reads input pi(k)
    const long ssq = static_cast<long>(sdim) * sdim;
    CMat s_struct = CMat::Zero(ssq, ssq);
    for (int col = 0; col < sdim; ++col)
        for (int row = 0; row < sdim; ++row) {
            CMat e = CMat::Zero(sdim, sdim);
            e(row, col) = 1.0;
            CMat img = CMat::Zero(sdim, sdim);
            for (int k = 0; k < nb; ++k) {
                const int j = spec.pi[k];
                const auto [dj, mj] = spec.blocks[j];
                const CMat inblk = emb[j].adjoint() * e * emb[j];
                const CMat x = partial_trace(inblk, {dj, mj}, {0});
                img += emb[k] *
                       kron(CMat(units[k].adjoint() * x * units[k]), deltas[k]) *
                       emb[k].adjoint();
            }
            s_struct.col(row + static_cast<long>(sdim) * col) = vec(img);
        }
    Channel structured = channel_from_superop(s_struct, sdim, sdim);

    // extend with a decaying H_0 that leaks into the first block
    std::vector<CMat> kraus;
    for (const CMat& k : structured.kraus) {
        CMat ext = CMat::Zero(d, d);
        ext.topLeftCorner(sdim, sdim) = k;
        kraus.push_back(std::move(ext));
    }
    if (spec.dim_h0 > 0) {
        const double g = spec.decay_gamma;
        if (!(g > 0.0 && g <= 1.0))
            throw std::invalid_argument("make_random_block: decay_gamma must be in (0,1] when dim_h0 > 0");
        if (g < 1.0) {
            CMat stay = CMat::Zero(d, d);
            stay.bottomRightCorner(spec.dim_h0, spec.dim_h0) =
                std::sqrt(1.0 - g) * CMat::Identity(spec.dim_h0, spec.dim_h0);
            kraus.push_back(std::move(stay));
        }
        CVec sink = CVec::Zero(d);
        const auto [d1, m1] = spec.blocks[0];
        // sink: first code vector of block 1 paired with delta_1's top eigenvector
        Eigen::SelfAdjointEigenSolver<CMat> des(deltas[0]);
        CVec dvec = des.eigenvectors().col(m1 - 1);
        for (int j = 0; j < m1; ++j) sink(offset[0] + j) = dvec(j);
        for (int r = 0; r < spec.dim_h0; ++r) {
            CMat leak = CMat::Zero(d, d);
            leak.col(sdim + r) = std::sqrt(g) * sink;
            kraus.push_back(std::move(leak));
        }
    }

    // hide the construction behind a random rotation
    const CMat u = random_unitary(d, rng);
    for (CMat& k : kraus) k = u * k * u.adjoint();

    ZooChannel out;
    out.name = "random-block:" + std::to_string(spec.seed);
    out.channel = channel_from_kraus(std::move(kraus));

    KnownStructure known;
    known.dim_h0 = spec.dim_h0;
    known.mu = (spec.dim_h0 > 0 && spec.decay_gamma < 1.0) ? 1.0 - spec.decay_gamma : 0.0;
    // canonical order: decreasing d, then decreasing m
    std::vector<int> order(nb);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (spec.blocks[a].first != spec.blocks[b].first)
            return spec.blocks[a].first > spec.blocks[b].first;
        return spec.blocks[a].second > spec.blocks[b].second;
    });
    for (int idx : order) {
        known.blocks.push_back(spec.blocks[idx]);
        known.deltas.push_back(deltas[idx]);
    }
    // cycle type of pi
    std::vector<char> seen(nb, 0);
    for (int k = 0; k < nb; ++k) {
        if (seen[k]) continue;
        int len = 0, cur = k;
        while (!seen[cur]) {
            seen[cur] = 1;
            cur = spec.pi[cur];
            ++len;
        }
        known.cycle_type.push_back(len);
    }
    std::sort(known.cycle_type.begin(), known.cycle_type.end());
    out.known = std::move(known);
    return out;
}

RandomBlockSpec sample_block_spec(std::uint64_t seed, int total_dim, bool exact) {
    if (total_dim < 2) throw std::invalid_argument("sample_block_spec: total_dim too small");
    RandomBlockSpec spec;
    spec.seed = seed;
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 1);

    // exact channels keep a decaying level but drain it in a single step
    // (mu = 0); the others leak gradually with mu = 1 - gamma in (0.3, 0.7)
    spec.dim_h0 = 1;
    spec.decay_gamma = exact ? 1.0 : 0.3 + 0.4 * rng.uniform();
    int budget = total_dim - spec.dim_h0;

    while (budget > 0) {
        const int dmax = std::min(3, budget);
        const int dk = 1 + static_cast<int>(rng.raw() % dmax);
        const int mmax = std::min(3, budget / dk);
        const int mk = 1 + static_cast<int>(rng.raw() % std::max(1, mmax));
        if (dk * mk > budget) continue;
        spec.blocks.emplace_back(dk, mk);
        budget -= dk * mk;
    }

    // permutation within equal-d groups
    const int nb = static_cast<int>(spec.blocks.size());
    spec.pi.resize(nb);
    std::map<int, std::vector<int>> groups;
    for (int k = 0; k < nb; ++k) groups[spec.blocks[k].first].push_back(k);
    for (auto& [dk, idx] : groups) {
        std::vector<int> shuffled = idx;
        for (int i = static_cast<int>(shuffled.size()) - 1; i > 0; --i)
            std::swap(shuffled[i], shuffled[rng.raw() % (i + 1)]);
        for (std::size_t i = 0; i < idx.size(); ++i) spec.pi[idx[i]] = shuffled[i];
    }
    return spec;
}

// ===========================================================================
// Spec-string parsing
// ===========================================================================

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

ZooChannel make_single(const std::string& spec, int dim, double gamma, std::uint64_t seed) {
    const auto parts = split(spec, ':');
    const std::string& name = parts[0];
    auto arg_num = [&](std::size_t i, double dflt) {
        return parts.size() > i ? std::stod(parts[i]) : dflt;
    };
    ZooChannel out;
    out.name = spec;
    if (name == "identity") {
        const int d = static_cast<int>(arg_num(1, dim));
        out.channel = make_identity(d);
    } else if (name == "depolarizing") {
        const int d = static_cast<int>(arg_num(1, dim));
        out.channel = make_depolarizing(d);
    } else if (name == "pinching" || name == "pinching-12-3") {
        out.channel = make_pinching({2, 1});
    } else if (name == "shift-dephase" || name == "shift-dephase-3") {
        const int d = (name == "shift-dephase-3") ? 3 : static_cast<int>(arg_num(1, 3));
        out.channel = make_shift_dephase(d);
    } else if (name == "ad" || name == "amplitude-damping") {
        out.channel = make_amplitude_damping(arg_num(1, gamma < 0.0 ? 0.5 : gamma));
    } else if (name == "transient" || name == "transient-qutrit") {
        out.channel = make_transient_qutrit();
    } else if (name == "unitary-phase") {
        out.channel = make_unitary_phase(arg_num(1, 0.7));
    } else if (name == "random-block") {
        // gamma < 0 keeps the seeded decay rate; gamma = 0 requests the
        // instant-decay (exactly convergent) variant
        const std::uint64_t s = parts.size() > 1 ? std::stoull(parts[1]) : seed;
        const int d = parts.size() > 2 ? std::stoi(parts[2]) : dim;
        const bool exact = gamma == 0.0;
        RandomBlockSpec rbs = sample_block_spec(s, std::max(d, 3), exact);
        if (gamma > 0.0 && gamma < 1.0) rbs.decay_gamma = gamma;
        return make_random_block(rbs);
    } else {
        throw std::invalid_argument("unknown zoo channel: " + name);
    }
    return out;
}

}  // namespace

ZooChannel make_zoo(const std::string& spec, int dim, double gamma, std::uint64_t seed) {
    const auto factors = split(spec, '*');
    if (factors.empty()) throw std::invalid_argument("empty zoo spec");
    ZooChannel acc = make_single(factors[0], dim, gamma, seed);
    for (std::size_t i = 1; i < factors.size(); ++i) {
        ZooChannel next = make_single(factors[i], dim, gamma, seed);
        acc.name += "*" + next.name;
        acc.channel = tensor_channel(acc.channel, next.channel);
        acc.known.reset();
    }
    return acc;
}

std::vector<std::string> zoo_names() {
    return {"identity",  "depolarizing", "pinching",       "shift-dephase",
            "ad",        "transient",    "unitary-phase",  "random-block"};
}

}  // namespace qms
