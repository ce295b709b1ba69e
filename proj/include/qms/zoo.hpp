// Generated test channels with known peripheral structure. Zoo channels are
// built, not stored: named constructions (identity, depolarizing, pinching,
// shift-dephase, amplitude damping, transient qutrit, unitary phase) plus
// seeded random block channels assembled as U (structured (+) decay) U^dag,
// and tensor products of any of these via "a*b" spec strings.

#pragma once

#include "qms/channels.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qms {

// Designed structure carried alongside a constructed channel so recovery can
// be checked exactly.
struct KnownStructure {
    int dim_h0 = 0;
    std::vector<std::pair<int, int>> blocks;    // (d_k, m_k), canonically sorted
    std::vector<int> cycle_type;                // sorted cycle lengths of pi
    std::vector<CMat> deltas;                   // same order as blocks
    double mu = 0.0;                            // designed decay rate (0 = exact)
};

struct ZooChannel {
    std::string name;
    Channel channel;
    std::optional<KnownStructure> known;
};

Channel make_identity(int d);
Channel make_depolarizing(int d);                       // X -> Tr(X) I/d
Channel make_pinching(const std::vector<int>& sizes);   // block sizes of the partition
Channel make_shift_dephase(int d);                      // X -> S diag(X) S^dag
Channel make_amplitude_damping(double gamma);
Channel make_transient_qutrit();
Channel make_unitary_phase(double theta);               // conjugation by diag(1, e^{i theta})

struct RandomBlockSpec {
    std::vector<std::pair<int, int>> blocks;   // (d_k, m_k)
    std::vector<int> pi;                       // output k reads input pi[k]; equal d only
    int dim_h0 = 0;
    double decay_gamma = 0.5;                  // leak rate of H_0; mu = 1 - gamma
    std::uint64_t seed = 0;                    // deltas, unitaries, rotation
};

ZooChannel make_random_block(const RandomBlockSpec& spec);

// Deterministic spec from (seed, total dimension): exact channels get
// dim_h0 = 0 and no decay (mu = 0).
RandomBlockSpec sample_block_spec(std::uint64_t seed, int total_dim, bool exact);

// Parses "identity:3", "depolarizing:2", "pinching", "shift-dephase",
// "ad:0.75", "transient", "unitary-phase:0.7", "random-block:SEED:DIM", and
// tensor products joined with '*'. dim/gamma/seed act as defaults for specs
// that omit their parameter.
ZooChannel make_zoo(const std::string& spec, int dim = 2, double gamma = -1.0,
                    std::uint64_t seed = 0);

std::vector<std::string> zoo_names();

}  // namespace qms
