#include "sasi/attack.hpp"

#include <numeric>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "sasi/sim.hpp"

namespace sasi {

namespace {

void require_modulus(uint64_t n) {
    if (n < 2) throw std::invalid_argument("modulus must be >= 2");
}

// Nonnegative mathematical mod of a signed 128-bit value.
uint64_t math_mod(i128 x, uint64_t n) {
    i128 r = x % i128(n);
    if (r < 0) r += i128(n);
    return uint64_t(r);
}

// Ascending scan with strict greater-than: ties break to the lowest residue.
std::optional<uint64_t> histogram_mode(const ObservationHistogram& h) {
    if (h.total == 0) return std::nullopt;
    uint64_t best = 0, best_count = 0;
    for (uint64_t i = 0; i < h.counts.size(); ++i) {
        if (h.counts[i] > best_count) {
            best_count = h.counts[i];
            best = i;
        }
    }
    return best;
}

GuessReport fold_stream(const TranscriptStream& stream, uint64_t modulus,
                        uint64_t budget, bool filter_detect) {
    GuessReport rep;
    rep.histogram = ObservationHistogram(modulus);
    while (rep.sessions_consumed < budget) {
        std::optional<Transcript> t = stream();
        if (!t) break;
        rep.sessions_consumed++;
        if (!filter_detect || detect_condition(*t, modulus))
            rep.histogram.add(delta_residue(*t, modulus));
    }
    rep.useful_sessions = rep.histogram.total;
    rep.guess = histogram_mode(rep.histogram);
    return rep;
}

}  // namespace

bool detect_condition(const Transcript& t, uint64_t n) {
    require_modulus(n);
    // exact signed arithmetic: (A xor IDS) + B - IDS fits comfortably in i128
    i128 rhs = i128((t.a ^ t.ids).v) + i128(t.b.v) - i128(t.ids.v);
    return uint64_t(t.c.v % n) == math_mod(rhs, n);
}

uint64_t delta_residue(const Transcript& t, uint64_t n) {
    require_modulus(n);
    return math_mod(i128(t.ids_next.v) - i128(t.ids.v), n);
}

GuessReport fig2_attack(const TranscriptStream& stream, const AttackConfig& cfg) {
    require_modulus(cfg.modulus);
    return fold_stream(stream, cfg.modulus, cfg.session_budget, /*filter_detect=*/true);
}

GuessReport distribution_attack(const TranscriptStream& stream, unsigned k,
                                uint64_t budget) {
    if (k < 1 || k > 8) throw std::invalid_argument("distribution attack wants k in [1, 8]");
    return fold_stream(stream, uint64_t(1) << k, budget, /*filter_detect=*/false);
}

ModulusClass classify_modulus(uint64_t n) {
    require_modulus(n);
    if ((n & (n - 1)) == 0) {
        uint64_t t = 0;
        while ((uint64_t(1) << t) != n) t++;
        return {ModulusKind::PowerOfTwo, t};
    }
    if (n % 3 == 0 && ((n / 3) & (n / 3 - 1)) == 0) {
        uint64_t t = 0;
        while ((uint64_t(1) << t) != n / 3) t++;
        return {ModulusKind::ThreeTimesPowerOfTwo, t};
    }
    if (n % 4 == 2 && n >= 10) return {ModulusKind::FourTPlusTen, (n - 10) / 4};
    if (n % 2 == 1 && n >= 5) return {ModulusKind::TwoTPlusFive, (n - 5) / 2};
    return {ModulusKind::Uncovered, 0};
}

std::optional<double> theoretical_probability(ModulusClass c, uint64_t n) {
    switch (c.kind) {
        case ModulusKind::PowerOfTwo: return 1.0;
        case ModulusKind::ThreeTimesPowerOfTwo: return 0.33;  // the table's literal value
        case ModulusKind::FourTPlusTen: return 2.0 / double(n);
        case ModulusKind::TwoTPlusFive: return 1.0 / double(n);
        case ModulusKind::Uncovered: return std::nullopt;
    }
    return std::nullopt;
}

double estimate_joint_probability(uint64_t n, uint64_t trials, uint64_t seed) {
    require_modulus(n);
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    // Degenerate-rotation regime: both keys uniform multiples of lcm(n, 96),
    // which forces K = 0 (mod n) and rotation amount 0 simultaneously.
    uint64_t L = std::lcm(n, uint64_t(96));
    u128 multiples = Word96::mask() / L + 1;
    uint64_t hits = 0;
    for (uint64_t i = 0; i < trials; ++i) {
        NonceSource src{seed};
        src.counter = i * 16;  // independent per-trial stream, parallel-safe
        TagIdentity id{src.next_word()};
        Word96 ids = src.next_word();
        Word96 k1{(src.next_word().v % multiples) * L};
        Word96 k2{(src.next_word().v % multiples) * L};
        Word96 n1 = src.next_word(), n2 = src.next_word();
        PartyState st{ids, k1, k2};
        ChallengeResult ch = reader_challenge(st, id, n1, n2, RotationVariant::Modular);
        auto resp = tag_process(st, id, ch.a, ch.b, ch.c, RotationVariant::Modular);
        Transcript t{st.ids, ch.a, ch.b, ch.c, resp->d, resp->next.ids};
        if (delta_residue(t, n) == mod_small(id.id, n)) hits++;
    }
    return double(hits) / double(trials);
}

GuessReport oracle_filtered_attack(const AttackConfig& cfg, const DebugSecrets& secrets) {
    require_modulus(cfg.modulus);
    uint64_t L = std::lcm(cfg.modulus, uint64_t(96));
    SimulatedTag tag(secrets.identity, secrets.state, NonceSource{cfg.seed}, cfg.variant);
    GuessReport rep;
    rep.histogram = ObservationHistogram(cfg.modulus);
    while (rep.sessions_consumed < cfg.session_budget) {
        const PartyState& st = tag.state();
        bool precondition =
            cfg.variant == RotationVariant::Modular
                ? st.k1.v % L == 0 && st.k2.v % L == 0
                : hamming_weight(st.k1) % 96 == 0 && hamming_weight(st.k2) % 96 == 0;
        Transcript t = tag.next();
        rep.sessions_consumed++;
        if (precondition) rep.histogram.add(delta_residue(t, cfg.modulus));
    }
    rep.useful_sessions = rep.histogram.total;
    rep.guess = histogram_mode(rep.histogram);
    return rep;
}

double chi_square_uniform(const ObservationHistogram& hist) {
    if (hist.counts.empty() || hist.total == 0) return 0.0;
    double expected = double(hist.total) / double(hist.counts.size());
    double stat = 0.0;
    for (uint64_t c : hist.counts) {
        double d = double(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

void write_histogram_csv(std::ostream& out, const ObservationHistogram& hist) {
    out << "residue,count\n";
    for (size_t i = 0; i < hist.counts.size(); ++i)
        out << i << ',' << hist.counts[i] << '\n';
}

std::string report_json(const GuessReport& report, uint64_t modulus,
                        RotationVariant variant) {
    nlohmann::ordered_json j;
    if (report.guess) j["guess"] = *report.guess;
    else j["guess"] = nullptr;
    j["useful_sessions"] = report.useful_sessions;
    j["sessions_consumed"] = report.sessions_consumed;
    j["modulus"] = modulus;
    j["variant"] = variant_name(variant);
    return j.dump(2);
}

const char* variant_name(RotationVariant v) {
    return v == RotationVariant::Modular ? "modular" : "hamming";
}

}  // namespace sasi
