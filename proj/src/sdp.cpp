#include "qms/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qms::sdp {

std::string status_name(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::max_iter: return "max-iter";
        case Status::infeasible: return "infeasible";
        case Status::numerical_failure: return "numerical-failure";
    }
    return "unknown";
}

// ===========================================================================
// Real symmetric core
// ===========================================================================

namespace {

struct REnt {
    int blk;
    int r, c;   // r <= c
    double v;
};

struct RCon {
    std::vector<REnt> ents;
    std::vector<int> blocks;   // distinct blocks touched, ascending
    double rhs = 0.0;
    double fnorm = 0.0;
};

struct RealProblem {
    std::vector<int> bsz;
    std::vector<RMat> C;
    std::vector<RCon> con;
};

using BlockMat = std::vector<RMat>;

BlockMat zeros_like(const std::vector<int>& bsz) {
    BlockMat m;
    m.reserve(bsz.size());
    for (int n : bsz) m.emplace_back(RMat::Zero(n, n));
    return m;
}

double block_dot(const BlockMat& a, const BlockMat& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
    return s;
}

double block_fnorm(const BlockMat& a) { return std::sqrt(std::max(0.0, block_dot(a, a))); }

// <A_i, M> for symmetric M
double con_dot(const RCon& a, const BlockMat& m) {
    double s = 0.0;
    for (const REnt& e : a.ents)
        s += (e.r == e.c) ? e.v * m[e.blk](e.r, e.r) : 2.0 * e.v * m[e.blk](e.r, e.c);
    return s;
}

// M += w * A_i
void con_add(BlockMat& m, const RCon& a, double w) {
    for (const REnt& e : a.ents) {
        m[e.blk](e.r, e.c) += w * e.v;
        if (e.r != e.c) m[e.blk](e.c, e.r) += w * e.v;
    }
}

// Largest alpha in (0, 1] with X + alpha * dX psd; returns 1 if the full step keeps psd.
double step_to_boundary(const BlockMat& x, const BlockMat& dx) {
    double alpha = 1.0;
    for (std::size_t b = 0; b < x.size(); ++b) {
        Eigen::LLT<RMat> llt(x[b]);
        if (llt.info() != Eigen::Success) return 0.0;
        RMat w = llt.matrixL().solve(dx[b]);
        w = llt.matrixL().solve(w.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<RMat> es((w + w.transpose()) / 2.0,
                                               Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
    }
    return alpha;
}

struct RealSolution {
    Status status = Status::numerical_failure;
    double pobj = 0.0, dobj = 0.0;
    double pinf = 0.0, dinf = 0.0;
    int iters = 0;
    BlockMat x, s;
    std::vector<double> y;
};

RealSolution solve_real(const RealProblem& p, double tol, int max_iter, bool verbose) {
    const int m = static_cast<int>(p.con.size());
    const int nblk = static_cast<int>(p.bsz.size());
    const double nu = std::accumulate(p.bsz.begin(), p.bsz.end(), 0.0);

    RealSolution sol;
    sol.y.assign(m, 0.0);

    // SDPT3-style starting point
    double bmax = 0.0, amax = 0.0;
    for (const RCon& c : p.con) {
        bmax = std::max(bmax, std::abs(c.rhs) / (1.0 + c.fnorm));
        amax = std::max(amax, c.fnorm);
    }
    double cnorm = 0.0;
    for (const RMat& c : p.C) cnorm = std::max(cnorm, c.norm());
    const double xi = std::max({10.0, std::sqrt(nu), nu * bmax});
    const double eta = std::max({10.0, std::sqrt(nu), cnorm, amax});

    sol.x = zeros_like(p.bsz);
    sol.s = zeros_like(p.bsz);
    for (int b = 0; b < nblk; ++b) {
        sol.x[b] = xi * RMat::Identity(p.bsz[b], p.bsz[b]);
        sol.s[b] = eta * RMat::Identity(p.bsz[b], p.bsz[b]);
    }

    double bnorm = 0.0;
    for (const RCon& c : p.con) bnorm += c.rhs * c.rhs;
    bnorm = std::sqrt(bnorm);

    const double feas_tol = std::max(tol, 1e-8);
    int stall_count = 0;

    RMat schur(m, m);
    std::vector<double> rp(m), rhs(m), dya(m), dy(m);
    BlockMat rd = zeros_like(p.bsz), sinv = zeros_like(p.bsz);
    BlockMat kblk = zeros_like(p.bsz);
    BlockMat dxa = zeros_like(p.bsz), dsa = zeros_like(p.bsz);
    BlockMat dx = zeros_like(p.bsz), ds = zeros_like(p.bsz);
    BlockMat tmp = zeros_like(p.bsz);

    auto assemble_dir = [&](const std::vector<double>& dyv, const BlockMat& rc,
                            BlockMat& dso, BlockMat& dxo) {
        // dS = Rd - A*(dy);  dX = Rc - sym(X dS Sinv)
        for (int b = 0; b < nblk; ++b) dso[b] = rd[b];
        for (int i = 0; i < m; ++i) con_add(dso, p.con[i], -dyv[i]);
        for (int b = 0; b < nblk; ++b) {
            RMat w = sol.x[b] * dso[b] * sinv[b];
            dxo[b] = rc[b] - (w + w.transpose()) / 2.0;
        }
    };

    for (int it = 0; it < max_iter; ++it) {
        // residuals
        for (int i = 0; i < m; ++i) rp[i] = p.con[i].rhs - con_dot(p.con[i], sol.x);
        for (int b = 0; b < nblk; ++b) rd[b] = p.C[b] - sol.s[b];
        for (int i = 0; i < m; ++i) con_add(rd, p.con[i], -sol.y[i]);

        const double mu = block_dot(sol.x, sol.s) / nu;
        double pobj = 0.0;
        for (int b = 0; b < nblk; ++b) pobj += p.C[b].cwiseProduct(sol.x[b]).sum();
        double dobj = 0.0;
        for (int i = 0; i < m; ++i) dobj += p.con[i].rhs * sol.y[i];

        double rpn = 0.0;
        for (double v : rp) rpn += v * v;
        rpn = std::sqrt(rpn);
        const double pinf = rpn / (1.0 + bnorm);
        const double dinf = block_fnorm(rd) / (1.0 + cnorm);
        const double relgap = std::abs(block_dot(sol.x, sol.s)) /
                              (1.0 + std::abs(pobj) + std::abs(dobj));

        sol.pobj = pobj;
        sol.dobj = dobj;
        sol.pinf = pinf;
        sol.dinf = dinf;
        sol.iters = it;

        if (verbose)
            std::fprintf(stderr, "  it %3d  pobj % .9e  dobj % .9e  gap %.2e  pinf %.2e  dinf %.2e\n",
                         it, pobj, dobj, relgap, pinf, dinf);

        if (relgap <= tol && pinf <= feas_tol && dinf <= feas_tol) {
            sol.status = Status::optimal;
            return sol;
        }
        // the feasibility residuals can floor slightly above feas_tol once the
        // Schur system is at its conditioning limit; accept a converged gap then
        if (relgap <= tol && pinf <= 100 * feas_tol && dinf <= 100 * feas_tol) {
            if (++stall_count >= 10) {
                sol.status = Status::optimal;
                return sol;
            }
        } else {
            stall_count = 0;
        }
        if (!std::isfinite(mu) || mu > 1e14) {
            sol.status = Status::numerical_failure;
            return sol;
        }
        if (pobj < -1e10 * (1.0 + std::abs(dobj)) && pinf <= 1e-3) {
            sol.status = Status::infeasible;   // primal unbounded => dual infeasible
            return sol;
        }
        double ynorm = 0.0;
        for (double v : sol.y) ynorm = std::max(ynorm, std::abs(v));
        if (ynorm > 1e12 * (1.0 + bnorm) && pinf < 1e-10) {
            sol.status = Status::infeasible;   // dual ray suspicion
            return sol;
        }

        // S^{-1} per block
        bool ok = true;
        for (int b = 0; b < nblk; ++b) {
            Eigen::LLT<RMat> llt(sol.s[b]);
            if (llt.info() != Eigen::Success) { ok = false; break; }
            sinv[b] = llt.solve(RMat::Identity(p.bsz[b], p.bsz[b]));
            sinv[b] = (sinv[b] + sinv[b].transpose()).eval() / 2.0;
        }
        if (!ok) {
            sol.status = Status::numerical_failure;
            return sol;
        }

        // Schur complement  M_ij = <A_i, sym(X A_j Sinv)>
        std::vector<char> touched(nblk, 0);
        for (int j = 0; j < m; ++j) {
            for (int b : p.con[j].blocks) { kblk[b].setZero(); touched[b] = 1; }
            for (const REnt& e : p.con[j].ents) {
                kblk[e.blk].noalias() += e.v * sol.x[e.blk].col(e.r) * sinv[e.blk].row(e.c);
                if (e.r != e.c)
                    kblk[e.blk].noalias() += e.v * sol.x[e.blk].col(e.c) * sinv[e.blk].row(e.r);
            }
            for (int b : p.con[j].blocks) kblk[b] = ((kblk[b] + kblk[b].transpose()) / 2.0).eval();
            for (int i = j; i < m; ++i) {
                double v = 0.0;
                for (const REnt& e : p.con[i].ents) {
                    if (!touched[e.blk]) continue;
                    v += (e.r == e.c) ? e.v * kblk[e.blk](e.r, e.r)
                                      : 2.0 * e.v * kblk[e.blk](e.r, e.c);
                }
                schur(i, j) = v;
                schur(j, i) = v;
            }
            for (int b : p.con[j].blocks) touched[b] = 0;
        }
        // tiny regularization keeps the factorization alive near the optimum
        double diag_scale = 0.0;
        for (int i = 0; i < m; ++i) diag_scale = std::max(diag_scale, schur(i, i));
        for (int i = 0; i < m; ++i) schur(i, i) += 1e-14 * std::max(1.0, diag_scale);

        Eigen::LLT<RMat> mllt(schur);
        if (mllt.info() != Eigen::Success) {
            for (int i = 0; i < m; ++i) schur(i, i) += 1e-10 * std::max(1.0, diag_scale);
            mllt.compute(schur);
            if (mllt.info() != Eigen::Success) {
                sol.status = Status::numerical_failure;
                return sol;
            }
        }

        // common rhs piece: A(sym(X Rd Sinv))
        std::vector<double> axrd(m);
        for (int b = 0; b < nblk; ++b) {
            RMat w = sol.x[b] * rd[b] * sinv[b];
            tmp[b] = (w + w.transpose()) / 2.0;
        }
        for (int i = 0; i < m; ++i) axrd[i] = con_dot(p.con[i], tmp);

        // predictor: Rc = -X  =>  rhs_i = b_i + axrd_i
        for (int i = 0; i < m; ++i) rhs[i] = p.con[i].rhs + axrd[i];
        Eigen::Map<Eigen::VectorXd> rhsv(rhs.data(), m);
        Eigen::VectorXd dyav = mllt.solve(rhsv);
        for (int i = 0; i < m; ++i) dya[i] = dyav(i);
        for (int b = 0; b < nblk; ++b) tmp[b] = -sol.x[b];
        assemble_dir(dya, tmp, dsa, dxa);

        double ap = step_to_boundary(sol.x, dxa);
        double ad = step_to_boundary(sol.s, dsa);
        ap = std::min(1.0, 0.98 * ap);
        ad = std::min(1.0, 0.98 * ad);

        double mu_aff = 0.0;
        for (int b = 0; b < nblk; ++b)
            mu_aff += (sol.x[b] + ap * dxa[b]).cwiseProduct(sol.s[b] + ad * dsa[b]).sum();
        mu_aff = std::max(0.0, mu_aff / nu);
        double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3);
        sigma = std::min(1.0, std::max(1e-8, sigma));

        // corrector: Rc = sigma*mu*Sinv - X - sym(dXa dSa Sinv)
        for (int b = 0; b < nblk; ++b) {
            RMat w = dxa[b] * dsa[b] * sinv[b];
            tmp[b] = sigma * mu * sinv[b] - sol.x[b] - (w + w.transpose()) / 2.0;
        }
        // rhs = rp - A(Rc) + axrd
        for (int i = 0; i < m; ++i) rhs[i] = rp[i] - con_dot(p.con[i], tmp) + axrd[i];
        Eigen::VectorXd dyv = mllt.solve(rhsv);
        // one step of iterative refinement
        {
            Eigen::VectorXd resid = rhsv - schur.selfadjointView<Eigen::Lower>() * dyv;
            dyv += mllt.solve(resid);
        }
        for (int i = 0; i < m; ++i) dy[i] = dyv(i);
        assemble_dir(dy, tmp, ds, dx);

        ap = std::min(1.0, 0.98 * step_to_boundary(sol.x, dx));
        ad = std::min(1.0, 0.98 * step_to_boundary(sol.s, ds));
        if (ap < 1e-8 && ad < 1e-8) {
            sol.status = (relgap <= 100 * tol) ? Status::optimal : Status::numerical_failure;
            return sol;
        }

        for (int b = 0; b < nblk; ++b) {
            sol.x[b] += ap * dx[b];
            sol.x[b] = ((sol.x[b] + sol.x[b].transpose()) / 2.0).eval();
            sol.s[b] += ad * ds[b];
            sol.s[b] = ((sol.s[b] + sol.s[b].transpose()) / 2.0).eval();
        }
        for (int i = 0; i < m; ++i) sol.y[i] += ad * dy[i];
    }
    sol.status = Status::max_iter;
    sol.iters = max_iter;
    return sol;
}

// ===========================================================================
// Complex Hermitian -> real symmetric embedding
// ===========================================================================

RMat embed_hermitian(const CMat& h) {
    const int n = static_cast<int>(h.rows());
    RMat e(2 * n, 2 * n);
    e.topLeftCorner(n, n) = h.real();
    e.bottomRightCorner(n, n) = h.real();
    e.topRightCorner(n, n) = -h.imag();
    e.bottomLeftCorner(n, n) = h.imag();
    return e;
}

CMat unembed_hermitian(const RMat& e) {
    const int n = static_cast<int>(e.rows()) / 2;
    CMat h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            h(i, j) = Cplx((e(i, j) + e(i + n, j + n)) / 2.0,
                           (e(i + n, j) - e(i, j + n)) / 2.0);
    return (h + h.adjoint()) / 2.0;
}

void push_embedded(std::vector<REnt>& out, int blk, int n, int r, int c, Cplx v) {
    const double a = v.real(), b = v.imag();
    if (r == c) {
        if (std::abs(b) > 1e-14)
            throw std::invalid_argument("sdp: diagonal constraint entry must be real");
        if (a != 0.0) {
            out.push_back({blk, r, r, a});
            out.push_back({blk, r + n, r + n, a});
        }
        return;
    }
    if (r > c) throw std::invalid_argument("sdp: entry must satisfy row <= col");
    if (a != 0.0) {
        out.push_back({blk, r, c, a});
        out.push_back({blk, r + n, c + n, a});
    }
    if (b != 0.0) {
        out.push_back({blk, r, c + n, -b});
        out.push_back({blk, c, r + n, b});
    }
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts) {
    const int nblk = static_cast<int>(p.block_dims.size());
    if (nblk == 0 || p.constraints.empty())
        throw std::invalid_argument("sdp::solve: need at least one block and one constraint");
    if (static_cast<int>(p.objective.size()) != nblk)
        throw std::invalid_argument("sdp::solve: objective/block count mismatch");

    RealProblem rp;
    rp.bsz.resize(nblk);
    rp.C.resize(nblk);
    for (int b = 0; b < nblk; ++b) {
        const int n = p.block_dims[b];
        if (p.objective[b].rows() != n || p.objective[b].cols() != n)
            throw std::invalid_argument("sdp::solve: objective block shape mismatch");
        rp.bsz[b] = 2 * n;
        rp.C[b] = embed_hermitian((p.objective[b] + p.objective[b].adjoint()) / 2.0);
    }
    rp.con.reserve(p.constraints.size());
    for (const Constraint& c : p.constraints) {
        RCon rc;
        rc.rhs = 2.0 * c.rhs;   // Tr(embed(A) embed(X)) = 2 Tr(A X)
        for (const HermEntry& e : c.entries) {
            if (e.block < 0 || e.block >= nblk)
                throw std::invalid_argument("sdp::solve: constraint block out of range");
            push_embedded(rc.ents, e.block, p.block_dims[e.block], e.row, e.col, e.value);
        }
        double fn = 0.0;
        for (const REnt& e : rc.ents) fn += (e.r == e.c) ? e.v * e.v : 2.0 * e.v * e.v;
        rc.fnorm = std::sqrt(fn);
        std::vector<int> blocks;
        for (const REnt& e : rc.ents) blocks.push_back(e.blk);
        std::sort(blocks.begin(), blocks.end());
        blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
        rc.blocks = std::move(blocks);
        rp.con.push_back(std::move(rc));
    }

    RealSolution rs = solve_real(rp, opts.tol, opts.max_iter, opts.verbose);

    SdpSolution out;
    out.status = rs.status;
    out.primal_value = rs.pobj / 2.0;
    out.dual_value = rs.dobj / 2.0;
    out.gap = std::abs(out.primal_value - out.dual_value);
    out.primal_infeas = rs.pinf;
    out.dual_infeas = rs.dinf;
    out.iterations = rs.iters;
    out.y.assign(rs.y.begin(), rs.y.end());
    out.x.reserve(nblk);
    out.s.reserve(nblk);
    for (int b = 0; b < nblk; ++b) {
        out.x.push_back(unembed_hermitian(rs.x[b]));
        out.s.push_back(unembed_hermitian(rs.s[b]));
    }
    return out;
}

// ===========================================================================
// Diamond norm
// ===========================================================================
//
// For a Hermiticity-preserving map D with Choi matrix J on R (x) B,
//     ||D||_diamond = max { <J, W> : -sigma (x) I_B <= W <= sigma (x) I_B,
//                            Tr sigma = 1 },
// solved over P = sigma (x) I - W >= 0, Q = sigma (x) I + W >= 0 with the
// linear conditions forcing (P+Q)/2 into the subspace {sigma (x) I_B}.

DiamondResult diamond_norm_full(const LinearMap& delta, double tol) {
    const int din = delta.dim_in, dout = delta.dim_out;
    CMat choi = superop_to_choi(delta.superop, din, dout);
    const double herm_defect = (choi - choi.adjoint()).norm();
    if (herm_defect > 1e-8 * std::max(1.0, choi.norm()))
        throw std::invalid_argument("diamond_norm: map is not Hermiticity-preserving");
    choi = ((choi + choi.adjoint()) / 2.0).eval();

    DiamondResult res;
    const double scale = choi.norm();
    if (scale < 1e-13) {
        res.value = res.primal = res.dual = 0.0;
        res.status = Status::optimal;
        return res;
    }
    const CMat j = choi / scale;
    const int s = din * dout;

    SdpProblem p;
    p.block_dims = {s, s};
    p.objective = {j / 2.0, -j / 2.0};

    auto idx = [dout](int r, int a) { return r * dout + a; };
    auto both = [](Constraint& c, int r, int cc, Cplx v) {
        c.entries.push_back({0, r, cc, v});
        c.entries.push_back({1, r, cc, v});
    };

    // (P+Q) entries with mismatched B indices vanish
    for (int r = 0; r < din; ++r)
        for (int rr = r; rr < din; ++rr)
            for (int a = 0; a < dout; ++a)
                for (int aa = 0; aa < dout; ++aa) {
                    if (a == aa) continue;
                    const int p1 = idx(r, a), p2 = idx(rr, aa);
                    if (p1 >= p2) continue;    // upper triangle only
                    Constraint cre;
                    both(cre, p1, p2, Cplx(1, 0));
                    p.constraints.push_back(std::move(cre));
                    Constraint cim;
                    both(cim, p1, p2, Cplx(0, 1));
                    p.constraints.push_back(std::move(cim));
                }
    // matching-B entries agree across B
    for (int r = 0; r < din; ++r)
        for (int rr = r; rr < din; ++rr)
            for (int a = 1; a < dout; ++a) {
                const int p1 = idx(r, a), p2 = idx(rr, a);
                const int q1 = idx(r, 0), q2 = idx(rr, 0);
                if (r == rr) {
                    Constraint c;   // diagonal pair, real
                    both(c, p1, p1, Cplx(1, 0));
                    both(c, q1, q1, Cplx(-1, 0));
                    p.constraints.push_back(std::move(c));
                } else {
                    Constraint cre;
                    both(cre, p1, p2, Cplx(1, 0));
                    both(cre, q1, q2, Cplx(-1, 0));
                    p.constraints.push_back(std::move(cre));
                    Constraint cim;
                    both(cim, p1, p2, Cplx(0, 1));
                    both(cim, q1, q2, Cplx(0, -1));
                    p.constraints.push_back(std::move(cim));
                }
            }
    // Tr(P+Q) = 2 dout  (Tr sigma = 1)
    {
        Constraint c;
        for (int k = 0; k < s; ++k) both(c, k, k, Cplx(1, 0));
        c.rhs = 2.0 * dout;
        p.constraints.push_back(std::move(c));
    }

    SolveOptions so;
    so.tol = tol;
    SdpSolution sol = solve(p, so);

    res.status = sol.status;
    res.primal = -sol.primal_value * scale;
    res.dual = -sol.dual_value * scale;
    res.gap = std::abs(res.primal - res.dual);
    res.value = (res.primal + res.dual) / 2.0;
    return res;
}

double diamond_norm(const LinearMap& delta, double tol) {
    DiamondResult r = diamond_norm_full(delta, tol);
    if (r.status != Status::optimal)
        throw std::runtime_error("diamond_norm: SDP did not converge (" + status_name(r.status) + ")");
    return r.value;
}

double diamond_norm(const CMat& superop, int dim_in, int dim_out, double tol) {
    return diamond_norm(LinearMap{dim_in, dim_out, superop}, tol);
}

// ===========================================================================
// Hypothesis testing relative entropy
// ===========================================================================

DhResult dh_epsilon(const CMat& rho, const CMat& sigma, double eps, double tol) {
    if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("dh_epsilon: eps must be in [0,1)");
    if (rho.rows() != sigma.rows() || rho.rows() != rho.cols() || sigma.rows() != sigma.cols())
        throw std::invalid_argument("dh_epsilon: shape mismatch");
    const int d = static_cast<int>(rho.rows());

    const double sig_tr = sigma.trace().real();
    if (sig_tr <= 0) throw std::invalid_argument("dh_epsilon: sigma must have positive trace");
    const CMat sig_hat = ((sigma + sigma.adjoint()) / (2.0 * sig_tr)).eval();
    const CMat rho_h = ((rho + rho.adjoint()) / 2.0).eval();

    SdpProblem p;
    p.block_dims = {d, d, 1};     // Lambda, I - Lambda, slack for the rho constraint
    p.objective = {sig_hat, CMat::Zero(d, d), CMat::Zero(1, 1)};

    for (int r = 0; r < d; ++r)
        for (int c = r; c < d; ++c) {
            if (r == c) {
                Constraint cc;
                cc.entries.push_back({0, r, r, Cplx(1, 0)});
                cc.entries.push_back({1, r, r, Cplx(1, 0)});
                cc.rhs = 1.0;
                p.constraints.push_back(std::move(cc));
            } else {
                Constraint cre;
                cre.entries.push_back({0, r, c, Cplx(1, 0)});
                cre.entries.push_back({1, r, c, Cplx(1, 0)});
                p.constraints.push_back(std::move(cre));
                Constraint cim;
                cim.entries.push_back({0, r, c, Cplx(0, 1)});
                cim.entries.push_back({1, r, c, Cplx(0, 1)});
                p.constraints.push_back(std::move(cim));
            }
        }
    {
        Constraint c;   // Tr(Lambda rho) - t = 1 - eps
        for (int r = 0; r < d; ++r)
            for (int cc = r; cc < d; ++cc)
                if (std::abs(rho_h(r, cc)) > 0.0 || r == cc)
                    c.entries.push_back({0, r, cc, (r == cc) ? Cplx(rho_h(r, cc).real(), 0)
                                                             : rho_h(r, cc)});
        c.entries.push_back({2, 0, 0, Cplx(-1, 0)});
        c.rhs = 1.0 - eps;
        p.constraints.push_back(std::move(c));
    }

    SolveOptions so;
    so.tol = tol;
    SdpSolution sol = solve(p, so);
    if (sol.status != Status::optimal)
        throw std::runtime_error("dh_epsilon: SDP did not converge (" + status_name(sol.status) + ")");

    DhResult out;
    out.status = sol.status;
    out.gap = sol.gap * sig_tr;
    out.beta = std::max(0.0, sol.primal_value) * sig_tr;
    if (out.beta < 1e-12) {
        out.infinite = true;
        out.bits = std::numeric_limits<double>::infinity();
    } else {
        out.bits = -std::log2(out.beta);
    }
    return out;
}

}  // namespace qms::sdp
