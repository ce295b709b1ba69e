// Quantum channel representations and calculus.
//
// A Channel carries three mutually consistent representations:
//   kraus    — list of dim_out x dim_in operators K_i with sum K_i^dag K_i = I
//   choi     — (dim_in*dim_out) square matrix J = sum_ij E_ij (x) Phi(E_ij),
//              input factor first, unnormalized (Tr J = dim_in)
//   superop  — dim_out^2 x dim_in^2 matrix acting on column-stacked operators,
//              vec(Phi(X)) = superop * vec(X)
//
// Conventions are fixed once here and covered by round-trip tests: vec() is
// column-stacking, Kronecker index order matches linalg::kron.

#pragma once

#include "qms/linalg.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace qms {

struct cptp_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Channel {
    int dim_in = 0;
    int dim_out = 0;
    std::vector<CMat> kraus;
    CMat choi;
    CMat superop;
};

struct StinespringIsometry {
    CMat v;          // (dim_out * dim_env) x dim_in, V^dag V = I
    int dim_env = 0;
    int dim_out = 0;
};

// A linear (not necessarily CPTP) map between operator spaces, held as a
// superoperator in the same column-stacking convention as Channel.
struct LinearMap {
    int dim_in = 0;
    int dim_out = 0;
    CMat superop;
};

// -- vectorization ----------------------------------------------------------

CVec vec(const CMat& x);                       // column stacking
CMat unvec(const CVec& v, int rows, int cols);

// -- representation conversions ---------------------------------------------

CMat kraus_to_superop(const std::vector<CMat>& kraus);
CMat superop_to_choi(const CMat& superop, int dim_in, int dim_out);
CMat choi_to_superop(const CMat& choi, int dim_in, int dim_out);
std::vector<CMat> choi_to_kraus(const CMat& choi, int dim_in, int dim_out,
                                double rank_tol = 1e-12);

// -- construction (validates CPTP within tol, throws cptp_error) -------------

Channel channel_from_kraus(std::vector<CMat> kraus, double tol = 1e-9);
Channel channel_from_choi(const CMat& choi, int dim_in, int dim_out, double tol = 1e-9);
Channel channel_from_superop(const CMat& superop, int dim_in, int dim_out, double tol = 1e-9);
Channel identity_channel(int d);

// -- calculus ----------------------------------------------------------------

CMat apply_channel(const Channel& phi, const CMat& x);
CMat apply_map(const LinearMap& m, const CMat& x);

Channel compose(const Channel& f, const Channel& g);   // f after g
Channel channel_power(const Channel& phi, long n);     // n >= 0, power(.,0) = id
Channel tensor_channel(const Channel& a, const Channel& b);

LinearMap adjoint_map(const Channel& phi);              // Tr(Y Phi(X)) = Tr(Phi*(Y) X)
StinespringIsometry stinespring(const Channel& phi);    // V = sum_i K_i (x) |i>_E
Channel complementary(const Channel& phi);              // Tr_B(V X V^dag)

// -- JSON wire format ---------------------------------------------------------
// {"dim_in": d, "dim_out": d', "kraus": [matrix, ...]} or {"choi": matrix, ...}
// where matrix = [[[re, im], ...row...], ...] in row-major order.

nlohmann::json channel_to_json(const Channel& phi);
Channel channel_from_json(const nlohmann::json& doc, double tol = 1e-9);
Channel load_channel(const std::string& path, double tol = 1e-9);

}  // namespace qms
