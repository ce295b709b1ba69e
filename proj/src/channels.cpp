#include "qms/channels.hpp"

#include <Eigen/Eigenvalues>

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <string>

namespace qms {

CVec vec(const CMat& x) {
    CVec v(x.size());
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index i = 0; i < x.rows(); ++i) v(k++) = x(i, j);
    return v;
}

CMat unvec(const CVec& v, int rows, int cols) {
    if (v.size() != static_cast<Eigen::Index>(rows) * cols)
        throw std::invalid_argument("unvec: size mismatch");
    CMat x(rows, cols);
    Eigen::Index k = 0;
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) x(i, j) = v(k++);
    return x;
}

CMat kraus_to_superop(const std::vector<CMat>& kraus) {
    if (kraus.empty()) throw std::invalid_argument("kraus_to_superop: empty list");
    const int dout = static_cast<int>(kraus[0].rows());
    const int din = static_cast<int>(kraus[0].cols());
    CMat s = CMat::Zero(static_cast<long>(dout) * dout, static_cast<long>(din) * din);
    for (const CMat& k : kraus) {
        if (k.rows() != dout || k.cols() != din)
            throw std::invalid_argument("kraus_to_superop: inconsistent shapes");
        s += kron(k.conjugate(), k);
    }
    return s;
}

// superop S[(a + dout*b), (i + din*j)] = Phi(E_ij)[a,b]
// choi    J[(i*dout + a), (j*dout + b)] = Phi(E_ij)[a,b]
CMat superop_to_choi(const CMat& superop, int dim_in, int dim_out) {
    CMat j = CMat::Zero(static_cast<long>(dim_in) * dim_out, static_cast<long>(dim_in) * dim_out);
    for (int i = 0; i < dim_in; ++i)
        for (int jj = 0; jj < dim_in; ++jj)
            for (int a = 0; a < dim_out; ++a)
                for (int b = 0; b < dim_out; ++b)
                    j(static_cast<long>(i) * dim_out + a, static_cast<long>(jj) * dim_out + b) =
                        superop(a + static_cast<long>(dim_out) * b, i + static_cast<long>(dim_in) * jj);
    return j;
}

CMat choi_to_superop(const CMat& choi, int dim_in, int dim_out) {
    CMat s = CMat::Zero(static_cast<long>(dim_out) * dim_out, static_cast<long>(dim_in) * dim_in);
    for (int i = 0; i < dim_in; ++i)
        for (int jj = 0; jj < dim_in; ++jj)
            for (int a = 0; a < dim_out; ++a)
                for (int b = 0; b < dim_out; ++b)
                    s(a + static_cast<long>(dim_out) * b, i + static_cast<long>(dim_in) * jj) =
                        choi(static_cast<long>(i) * dim_out + a, static_cast<long>(jj) * dim_out + b);
    return s;
}

std::vector<CMat> choi_to_kraus(const CMat& choi, int dim_in, int dim_out, double rank_tol) {
    Eigen::SelfAdjointEigenSolver<CMat> es((choi + choi.adjoint()) / 2.0);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    std::vector<CMat> kraus;
    for (Eigen::Index r = 0; r < es.eigenvalues().size(); ++r) {
        const double lam = es.eigenvalues()(r);
        if (lam <= rank_tol * scale) continue;
        // Choi eigenvector w with w[(i*dout + a)] = K[a, i]
        CMat k(dim_out, dim_in);
        for (int i = 0; i < dim_in; ++i)
            for (int a = 0; a < dim_out; ++a)
                k(a, i) = std::sqrt(lam) * es.eigenvectors()(static_cast<long>(i) * dim_out + a, r);
        kraus.push_back(std::move(k));
    }
    return kraus;
}

namespace {

void validate(Channel& c, double tol) {
    // trace preservation
    CMat tp = CMat::Zero(c.dim_in, c.dim_in);
    for (const CMat& k : c.kraus) tp += k.adjoint() * k;
    const double tp_defect = (tp - CMat::Identity(c.dim_in, c.dim_in)).norm();
    if (tp_defect > tol * c.dim_in)
        throw cptp_error("channel not trace preserving, defect " + std::to_string(tp_defect));
    // complete positivity
    Eigen::SelfAdjointEigenSolver<CMat> es((c.choi + c.choi.adjoint()) / 2.0);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol * std::max(1.0, es.eigenvalues().maxCoeff()))
        throw cptp_error("channel not completely positive, Choi eigenvalue " +
                         std::to_string(min_eig));
    // representation agreement
    const double agree = (c.superop - kraus_to_superop(c.kraus)).norm();
    if (agree > 1e-9 * std::max(1.0, c.superop.norm()))
        throw cptp_error("channel representations disagree by " + std::to_string(agree));
}

}  // namespace

Channel channel_from_kraus(std::vector<CMat> kraus, double tol) {
    if (kraus.empty()) throw std::invalid_argument("channel_from_kraus: empty list");
    Channel c;
    c.dim_out = static_cast<int>(kraus[0].rows());
    c.dim_in = static_cast<int>(kraus[0].cols());
    c.kraus = std::move(kraus);
    c.superop = kraus_to_superop(c.kraus);
    c.choi = superop_to_choi(c.superop, c.dim_in, c.dim_out);
    validate(c, tol);
    return c;
}

Channel channel_from_choi(const CMat& choi, int dim_in, int dim_out, double tol) {
    if (choi.rows() != static_cast<Eigen::Index>(dim_in) * dim_out || choi.rows() != choi.cols())
        throw std::invalid_argument("channel_from_choi: shape mismatch");
    Channel c;
    c.dim_in = dim_in;
    c.dim_out = dim_out;
    c.choi = choi;
    c.kraus = choi_to_kraus(choi, dim_in, dim_out);
    if (c.kraus.empty()) throw cptp_error("channel_from_choi: zero map");
    c.superop = choi_to_superop(choi, dim_in, dim_out);
    validate(c, tol);
    return c;
}

Channel channel_from_superop(const CMat& superop, int dim_in, int dim_out, double tol) {
    if (superop.rows() != static_cast<Eigen::Index>(dim_out) * dim_out ||
        superop.cols() != static_cast<Eigen::Index>(dim_in) * dim_in)
        throw std::invalid_argument("channel_from_superop: shape mismatch");
    Channel c;
    c.dim_in = dim_in;
    c.dim_out = dim_out;
    c.choi = superop_to_choi(superop, dim_in, dim_out);
    c.kraus = choi_to_kraus(c.choi, dim_in, dim_out);
    if (c.kraus.empty()) throw cptp_error("channel_from_superop: zero map");
    // rebuild the superop from the extracted Kraus set so the three
    // representations agree exactly, then check it matches the input
    c.superop = kraus_to_superop(c.kraus);
    if ((c.superop - superop).norm() > 1e-8 * std::max(1.0, superop.norm()))
        throw cptp_error("channel_from_superop: input map is not CP within tolerance");
    c.superop = superop;
    validate(c, tol);
    return c;
}

Channel identity_channel(int d) {
    return channel_from_kraus({CMat::Identity(d, d)});
}

CMat apply_channel(const Channel& phi, const CMat& x) {
    if (x.rows() != phi.dim_in || x.cols() != phi.dim_in)
        throw std::invalid_argument("apply: dimension mismatch");
    return unvec(phi.superop * vec(x), phi.dim_out, phi.dim_out);
}

CMat apply_map(const LinearMap& m, const CMat& x) {
    return unvec(m.superop * vec(x), m.dim_out, m.dim_out);
}

Channel compose(const Channel& f, const Channel& g) {
    if (g.dim_out != f.dim_in) throw std::invalid_argument("compose: dimension mismatch");
    return channel_from_superop(f.superop * g.superop, g.dim_in, f.dim_out);
}

Channel channel_power(const Channel& phi, long n) {
    if (phi.dim_in != phi.dim_out) throw std::invalid_argument("channel_power: non-square channel");
    if (n < 0) throw std::invalid_argument("channel_power: negative power");
    const long dsq = static_cast<long>(phi.dim_in) * phi.dim_in;
    CMat acc = CMat::Identity(dsq, dsq);
    CMat base = phi.superop;
    long m = n;
    while (m > 0) {
        if (m & 1) acc = acc * base;
        m >>= 1;
        if (m > 0) base = base * base;
    }
    return channel_from_superop(acc, phi.dim_in, phi.dim_out);
}

Channel tensor_channel(const Channel& a, const Channel& b) {
    std::vector<CMat> kraus;
    kraus.reserve(a.kraus.size() * b.kraus.size());
    for (const CMat& ka : a.kraus)
        for (const CMat& kb : b.kraus) kraus.push_back(kron(ka, kb));
    return channel_from_kraus(std::move(kraus));
}

LinearMap adjoint_map(const Channel& phi) {
    // vec(Phi*(Y)) = superop^dag vec(Y)
    return LinearMap{phi.dim_out, phi.dim_in, phi.superop.adjoint()};
}

StinespringIsometry stinespring(const Channel& phi) {
    const int ne = static_cast<int>(phi.kraus.size());
    StinespringIsometry s;
    s.dim_env = ne;
    s.dim_out = phi.dim_out;
    s.v = CMat::Zero(static_cast<long>(phi.dim_out) * ne, phi.dim_in);
    // V[(b,e), a] = K_e[b, a]  (output factor first, environment second)
    for (int e = 0; e < ne; ++e)
        for (int b = 0; b < phi.dim_out; ++b)
            for (int a = 0; a < phi.dim_in; ++a)
                s.v(static_cast<long>(b) * ne + e, a) = phi.kraus[e](b, a);
    return s;
}

Channel complementary(const Channel& phi) {
    const int ne = static_cast<int>(phi.kraus.size());
    // Kraus of the complementary channel: L_b[e, a] = K_e[b, a]
    std::vector<CMat> kraus(phi.dim_out, CMat::Zero(ne, phi.dim_in));
    for (int b = 0; b < phi.dim_out; ++b)
        for (int e = 0; e < ne; ++e)
            for (int a = 0; a < phi.dim_in; ++a) kraus[b](e, a) = phi.kraus[e](b, a);
    return channel_from_kraus(std::move(kraus));
}

// ===========================================================================
// JSON
// ===========================================================================

namespace {

nlohmann::json matrix_to_json(const CMat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

CMat matrix_from_json(const nlohmann::json& doc, int rows, int cols) {
    if (!doc.is_array() || static_cast<int>(doc.size()) != rows)
        throw std::invalid_argument("channel JSON: matrix row count mismatch");
    CMat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto& row = doc[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw std::invalid_argument("channel JSON: matrix column count mismatch");
        for (int j = 0; j < cols; ++j) {
            const auto& e = row[j];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw std::invalid_argument("channel JSON: entries must be [re, im] pairs");
            m(i, j) = Cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

}  // namespace

nlohmann::json channel_to_json(const Channel& phi) {
    nlohmann::json doc;
    doc["schema"] = 1;
    doc["dim_in"] = phi.dim_in;
    doc["dim_out"] = phi.dim_out;
    nlohmann::json kraus = nlohmann::json::array();
    for (const CMat& k : phi.kraus) kraus.push_back(matrix_to_json(k));
    doc["kraus"] = std::move(kraus);
    return doc;
}

Channel channel_from_json(const nlohmann::json& doc, double tol) {
    if (!doc.contains("dim_in") || !doc.contains("dim_out"))
        throw std::invalid_argument("channel JSON: missing dim_in/dim_out");
    const int din = doc["dim_in"].get<int>();
    const int dout = doc["dim_out"].get<int>();
    if (din <= 0 || dout <= 0) throw std::invalid_argument("channel JSON: nonpositive dimension");
    if (doc.contains("kraus")) {
        const auto& karr = doc["kraus"];
        if (!karr.is_array() || karr.empty())
            throw std::invalid_argument("channel JSON: kraus must be a nonempty array");
        std::vector<CMat> kraus;
        for (const auto& kj : karr) kraus.push_back(matrix_from_json(kj, dout, din));
        return channel_from_kraus(std::move(kraus), tol);
    }
    if (doc.contains("choi")) {
        CMat choi = matrix_from_json(doc["choi"], din * dout, din * dout);
        return channel_from_choi(choi, din, dout, tol);
    }
    throw std::invalid_argument("channel JSON: need either kraus or choi");
}

Channel load_channel(const std::string& path, double tol) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open channel file: " + path);
    nlohmann::json doc;
    in >> doc;
    return channel_from_json(doc, tol);
}

}  // namespace qms
