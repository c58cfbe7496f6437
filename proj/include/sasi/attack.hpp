#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sasi/protocol.hpp"
#include "sasi/word96.hpp"

namespace sasi {

struct AttackConfig {
    uint64_t modulus = 96;
    uint64_t session_budget = uint64_t(1) << 18;
    RotationVariant variant = RotationVariant::Modular;
    uint64_t seed = 0;
};

// Counters over residues 0..N-1 accumulated by the attacks.
struct ObservationHistogram {
    std::vector<uint64_t> counts;
    uint64_t total = 0;

    explicit ObservationHistogram(uint64_t n = 0) : counts(n, 0) {}
    void add(uint64_t residue) {
        counts.at(residue)++;
        total++;
    }
};

// guess is empty when no session survived the filter — distinct from a
// genuine guess of residue 0. Ties break to the lowest residue.
struct GuessReport {
    std::optional<uint64_t> guess;
    ObservationHistogram histogram;
    uint64_t useful_sessions = 0;
    uint64_t sessions_consumed = 0;
};

// Transcript streams are pull-based: return nullopt when exhausted.
using TranscriptStream = std::function<std::optional<Transcript>()>;

// Detection condition: C == (A xor IDS) + (B - IDS) (mod n), with B - IDS an
// exact signed integer difference and a nonnegative mathematical mod on both
// sides. Wraparound-then-reduce would disagree in the mod-3 component
// whenever IDS_next < IDS (2^96 mod 96 = 64), so the signed form is load-bearing.
bool detect_condition(const Transcript& t, uint64_t n);

// (ids_next - ids) mod n, same signed-difference arithmetic.
uint64_t delta_residue(const Transcript& t, uint64_t n);

// The headline attack: filter by detect_condition, vote delta residues,
// return the histogram mode.
GuessReport fig2_attack(const TranscriptStream& stream, const AttackConfig& cfg);

// Generalized attack: no filter, modulus 2^k, k in [1, 8].
GuessReport distribution_attack(const TranscriptStream& stream, unsigned k,
                                uint64_t budget);

// Modulus families from the probability table, in precedence order.
enum class ModulusKind { PowerOfTwo, ThreeTimesPowerOfTwo, FourTPlusTen, TwoTPlusFive, Uncovered };

struct ModulusClass {
    ModulusKind kind = ModulusKind::Uncovered;
    uint64_t t = 0;  // meaningless for Uncovered

    friend bool operator==(ModulusClass a, ModulusClass b) {
        return a.kind == b.kind && (a.kind == ModulusKind::Uncovered || a.t == b.t);
    }
};

ModulusClass classify_modulus(uint64_t n);

// Tabled probability for the class: 1.00, 0.33, 2/N, 1/N; empty for Uncovered.
std::optional<double> theoretical_probability(ModulusClass c, uint64_t n);

// Empirical probability that the recovery equation (IDS_next - IDS) == ID
// (mod n) holds over single sessions with K1, K2 forced to uniform multiples
// of lcm(n, 96) — the degenerate-rotation regime the whole analysis assumes —
// and everything else uniform. Modular variant. Trials are counter-strided so
// parallel evaluation would reproduce the sequential statistics exactly.
double estimate_joint_probability(uint64_t n, uint64_t trials, uint64_t seed);

// Simulation-side instrument: like fig2_attack, but counts only sessions
// whose keys truly satisfy the degenerate precondition for modulus n
// (both keys = 0 mod lcm(n, 96) for the modular variant; rotation amount
// 0 mod 96 for hamming). Separates recovery accuracy from detection noise.
struct DebugSecrets {
    TagIdentity identity;
    PartyState state;
};

GuessReport oracle_filtered_attack(const AttackConfig& cfg, const DebugSecrets& secrets);

// Pearson statistic of the histogram against the uniform distribution,
// dof = bins - 1.
double chi_square_uniform(const ObservationHistogram& hist);

// Report emission: CSV histogram ("residue,count") and a JSON summary with
// guess (null when no observation), useful_sessions, sessions_consumed,
// modulus, variant.
void write_histogram_csv(std::ostream& out, const ObservationHistogram& hist);
std::string report_json(const GuessReport& report, uint64_t modulus,
                        RotationVariant variant);

const char* variant_name(RotationVariant v);

}  // namespace sasi
