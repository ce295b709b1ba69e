// Zero-error communication protocols built from a peripheral decomposition
// and certified by exact simulation through Phi^n:
//   - quantum code into the largest block, decoded by numerically inverting
//     the restriction of Phi^n to the peripheral space;
//   - classical code from one basis state per block dimension, decoded by
//     projectors onto the evolved (mutually orthogonal) supports;
//   - entanglement-assisted code: block-local Heisenberg-Weyl twists of
//     per-block maximally entangled pairs (superdense coding per block);
//   - private classical code derived from the quantum code, with an
//     environment-independence certificate through the complementary channel.

#pragma once

#include "qms/channels.hpp"
#include "qms/structure.hpp"

#include <string>
#include <vector>

namespace qms {

struct protocol_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProtocolEvalReport {
    long n = 0;
    double worst_error = 0.0;
    double env_fidelity = 1.0;      // private codes only; min pairwise fidelity
    int worst_pair_a = -1;          // offending message pair on env failure
    int worst_pair_b = -1;
    bool pass = false;
    double tolerance = 1e-9;
};

// -- quantum ------------------------------------------------------------------

struct QuantumCode {
    int block_index = 0;            // k* = argmax d_k
    int code_dim = 1;               // d_{k*}
    double rate_bits = 0.0;
    Channel encoder;                // B(C^d) -> B(H_A)
    // decoder-factory state
    CMat chi_basis_vecs;            // d^2 x D, orthonormal columns spanning vec(chi)
    CMat chi_action;                // restriction of Phi to chi in that basis
    double chi_cond = 0.0;          // condition number of the restriction
    CMat proj_superop;              // peripheral projector P
    CMat isometry;                  // W_{k*}
};

QuantumCode build_quantum_code(const Channel& phi, const AsymptoticPart& asym,
                               const PeripheralDecomposition& decomp);

// Recovery channel for time n; with sabotage the inversion of Phi^n|chi is
// skipped (negative control).
Channel quantum_decoder(const QuantumCode& code, long n, bool sabotage = false);

ProtocolEvalReport eval_quantum_code(const QuantumCode& code, const Channel& phi, long n,
                                     bool sabotage = false, double tol = 1e-9);

// -- classical ----------------------------------------------------------------

struct ClassicalCode {
    int message_count = 0;          // sum_k d_k
    double rate_bits = 0.0;
    std::vector<CMat> states;       // W_k (|i><i| (x) delta_k) W_k^dag
    std::vector<int> block_of;
};

ClassicalCode build_classical_code(const PeripheralDecomposition& decomp);

// Projectors onto the evolved supports, completed on message 0.
std::vector<CMat> classical_povm(const ClassicalCode& code, const Channel& phi, long n);

ProtocolEvalReport eval_classical_code(const ClassicalCode& code, const Channel& phi, long n,
                                       double tol = 1e-9);

// -- entanglement assisted ------------------------------------------------------

struct EAMessage {
    int block = 0;
    int shift = 0;    // a in X^a Z^b
    int phase = 0;    // b
};

struct EACode {
    int message_count = 0;          // sum_k d_k^2
    double rate_bits = 0.0;
    int ref_dim = 1;                // prod_k d_k
    std::vector<EAMessage> messages;
    std::vector<PeripheralBlock> blocks;   // snapshot of the decomposition
};

EACode build_ea_code(const PeripheralDecomposition& decomp);

// Signal states on (ref (x) A) after encoding message m and applying Phi^n.
std::vector<CMat> ea_signals(const EACode& code, const Channel& phi, long n);

// Normalized Gram matrix of the signals (identity certifies orthogonality).
CMat ea_signal_gram(const EACode& code, const Channel& phi, long n);

ProtocolEvalReport eval_ea_code(const EACode& code, const Channel& phi, long n,
                                double tol = 1e-9);

// -- private ---------------------------------------------------------------------

struct PrivateCode {
    int message_count = 0;
    double rate_bits = 0.0;
    std::vector<CMat> states;
    std::vector<CMat> povm;
};

// Turns a zero-error quantum code into a private classical code: encoding
// states E(|m><m|), decoding POVM D_n^*(|m><m|); the report certifies both
// decoding probabilities and environment independence through Phi^n's
// complementary channel.
std::pair<PrivateCode, ProtocolEvalReport> private_from_quantum(const QuantumCode& code,
                                                                const Channel& phi, long n,
                                                                double tol = 1e-9);

// Heisenberg-Weyl shift/clock pair on C^d.
CMat hw_shift(int d);
CMat hw_clock(int d);

}  // namespace qms
