#include "qms/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace qms {

long dim_product(const DimList& dims) {
    long p = 1;
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("dim_product: nonpositive dimension");
        p *= d;
    }
    return p;
}

DensityOp make_density(const CMat& m, double tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument("make_density: matrix not square");
    const double herm = (m - m.adjoint()).norm();
    if (herm > tol * std::max(1.0, m.norm()))
        throw std::invalid_argument("make_density: not Hermitian (defect " + std::to_string(herm) + ")");
    Eigen::SelfAdjointEigenSolver<CMat> es((m + m.adjoint()) / 2.0);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("make_density: negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol)
        throw std::invalid_argument("make_density: trace " + std::to_string(tr) + " != 1");
    return DensityOp{static_cast<int>(m.rows()), m};
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMat partial_trace(const CMat& x, const DimList& dims, const std::vector<int>& keep) {
    if (x.rows() != x.cols()) throw std::invalid_argument("partial_trace: matrix not square");
    const long total = dim_product(dims);
    if (total != x.rows()) throw std::invalid_argument("partial_trace: dims do not match matrix size");
    const int f = static_cast<int>(dims.size());
    std::vector<bool> kept(f, false);
    for (int k : keep) {
        if (k < 0 || k >= f) throw std::invalid_argument("partial_trace: keep index out of range");
        kept[k] = true;
    }

    // strides of each factor in the composite (row-major over factors)
    std::vector<long> stride(f, 1);
    for (int i = f - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    long dkeep = 1, dtrace = 1;
    std::vector<int> keep_idx, trace_idx;
    for (int i = 0; i < f; ++i) {
        if (kept[i]) { dkeep *= dims[i]; keep_idx.push_back(i); }
        else         { dtrace *= dims[i]; trace_idx.push_back(i); }
    }

    // enumerate kept/traced multi-indices and their ambient offsets
    auto offsets = [&](const std::vector<int>& idx, long count) {
        std::vector<long> off(count, 0);
        for (long v = 0; v < count; ++v) {
            long rem = v, o = 0;
            for (int pos = static_cast<int>(idx.size()) - 1; pos >= 0; --pos) {
                const int i = idx[pos];
                o += (rem % dims[i]) * stride[i];
                rem /= dims[i];
            }
            off[v] = o;
        }
        return off;
    };
    const std::vector<long> ko = offsets(keep_idx, dkeep);
    const std::vector<long> to = offsets(trace_idx, dtrace);

    CMat out = CMat::Zero(dkeep, dkeep);
    for (long r = 0; r < dkeep; ++r)
        for (long c = 0; c < dkeep; ++c) {
            Cplx s = 0.0;
            for (long t = 0; t < dtrace; ++t) s += x(ko[r] + to[t], ko[c] + to[t]);
            out(r, c) = s;
        }
    return out;
}

double trace_norm(const CMat& x) {
    if (x.rows() == 0 || x.cols() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(x);
    return svd.singularValues().sum();
}

double op_norm(const CMat& x) {
    if (x.rows() == 0 || x.cols() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(x);
    return svd.singularValues()(0);
}

CMat psd_sqrt(const CMat& x, double tol) {
    if (x.rows() != x.cols()) throw std::invalid_argument("psd_sqrt: matrix not square");
    Eigen::SelfAdjointEigenSolver<CMat> es((x + x.adjoint()) / 2.0);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -tol * scale)
        throw std::invalid_argument("psd_sqrt: negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
    RVec vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

CMat psd_inv_sqrt(const CMat& x, double eig_tol) {
    Eigen::SelfAdjointEigenSolver<CMat> es((x + x.adjoint()) / 2.0);
    const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    RVec inv = RVec::Zero(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (es.eigenvalues()(i) > eig_tol * scale) inv(i) = 1.0 / std::sqrt(es.eigenvalues()(i));
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

Cplx hs_inner(const CMat& a, const CMat& b) { return (a.adjoint() * b).trace(); }

CMat support_projector(const CMat& x, double eig_tol) {
    Eigen::SelfAdjointEigenSolver<CMat> es((x + x.adjoint()) / 2.0);
    const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    CMat proj = CMat::Zero(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (es.eigenvalues()(i) > eig_tol * scale)
            proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    return proj;
}

// ===========================================================================
// eig_general
// ===========================================================================

namespace {

// Orthonormal basis of the near-null space of m, taking exactly the `want`
// smallest singular directions that fall below `thresh` (or fewer).
CMat near_null_space(const CMat& m, double thresh, int want) {
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
    const RVec sv = svd.singularValues();
    const int n = static_cast<int>(sv.size());
    int count = 0;
    for (int i = n - 1; i >= 0 && count < want; --i) {
        if (sv(i) <= thresh) ++count;
        else break;
    }
    return svd.matrixV().rightCols(count);
}

}  // namespace

std::vector<EigCluster> eig_general(const CMat& x, const EigOptions& opts) {
    if (x.rows() != x.cols()) throw std::invalid_argument("eig_general: matrix not square");
    const int n = static_cast<int>(x.rows());
    const double xnorm = std::max(1e-300, x.norm());

    Eigen::ComplexEigenSolver<CMat> es(x, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eig_general: eigensolver did not converge");
    CVec vals = es.eigenvalues();

    // cluster by transitive closure of the pairwise tolerance relation
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) { parent[a] = parent[parent[a]]; a = parent[a]; }
        return a;
    };
    const double ctol = opts.cluster_tol * std::max(1.0, xnorm);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(vals(i) - vals(j)) <= ctol) parent[find(i)] = find(j);

    std::vector<std::vector<int>> groups;
    std::vector<int> root_of(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (root_of[r] < 0) { root_of[r] = static_cast<int>(groups.size()); groups.emplace_back(); }
        groups[root_of[r]].push_back(i);
    }

    std::vector<EigCluster> out;
    for (const auto& g : groups) {
        EigCluster c;
        Cplx mean = 0.0;
        double radius = 0.0;
        for (int i : g) mean += vals(i);
        mean /= static_cast<double>(g.size());
        for (int i : g) radius = std::max(radius, std::abs(vals(i) - mean));
        c.value = mean;
        c.algebraic = static_cast<int>(g.size());

        const double thresh = std::max(opts.rank_tol * xnorm, 2.0 * radius + 1e-13 * xnorm);
        CMat shifted = x - mean * CMat::Identity(n, n);
        c.right = near_null_space(shifted, thresh, c.algebraic);
        c.geometric = static_cast<int>(c.right.cols());
        if (c.geometric == 0)
            throw std::runtime_error("eig_general: empty eigenspace for a cluster");
        CMat leftraw = near_null_space(shifted.adjoint(), thresh, c.algebraic).leftCols(c.geometric);

        // residual certification
        for (int j = 0; j < c.geometric; ++j) {
            const double res = (x * c.right.col(j) - mean * c.right.col(j)).norm();
            if (res > 1e-9 * xnorm + 10.0 * radius)
                throw std::runtime_error("eig_general: eigenvector residual " + std::to_string(res));
        }

        // biorthogonalize: want left^dag * right = I
        CMat pairing = leftraw.adjoint() * c.right;
        Eigen::JacobiSVD<CMat> psvd(pairing, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double smin = psvd.singularValues().minCoeff();
        const double smax = psvd.singularValues().maxCoeff();
        c.pairing_cond = (smin > 0) ? smax / smin : std::numeric_limits<double>::infinity();
        if (smin > 1e-12) {
            c.left = leftraw * pairing.inverse().adjoint();
            c.biorthogonal = true;
        } else {
            c.left = leftraw;
            c.biorthogonal = false;
        }
        out.push_back(std::move(c));
    }

    std::sort(out.begin(), out.end(), [](const EigCluster& a, const EigCluster& b) {
        if (std::abs(a.value) != std::abs(b.value)) return std::abs(a.value) > std::abs(b.value);
        return std::arg(a.value) < std::arg(b.value);
    });
    return out;
}

// ===========================================================================
// randomness
// ===========================================================================

CMat random_ginibre(int rows, int cols, Rng& rng) {
    CMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Cplx(rng.normal(), rng.normal());
    return m;
}

CMat random_unitary(int d, Rng& rng) {
    CMat g = random_ginibre(d, d, rng);
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ();
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix phases so the distribution is Haar
    for (int i = 0; i < d; ++i) {
        Cplx ph = r(i, i) / std::abs(r(i, i));
        q.col(i) *= ph;
    }
    return q;
}

CMat random_hermitian(int d, Rng& rng) {
    CMat g = random_ginibre(d, d, rng);
    return (g + g.adjoint()) / 2.0;
}

CMat random_psd(int d, Rng& rng) {
    CMat g = random_ginibre(d, d, rng);
    return g * g.adjoint() / static_cast<double>(d);
}

CMat random_density(int d, Rng& rng) {
    CMat p = random_psd(d, rng);
    return p / p.trace().real();
}

CVec random_pure(int d, Rng& rng) {
    CVec v(d);
    for (int i = 0; i < d; ++i) v(i) = Cplx(rng.normal(), rng.normal());
    return v / v.norm();
}

}  // namespace qms
