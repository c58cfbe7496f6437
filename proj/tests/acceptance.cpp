// Acceptance gate: one check per numbered criterion, each printing a single
// [PASS]/[FAIL] line with the measured numbers. Run with no arguments for the
// full gate or with --criterion N for one. Exit code 0 iff every selected
// criterion passed.
//
// Criterion 5's chi-square bar is known not to hold at the pinned 2^10-session
// budget (the underlying bias is the 1/96 degenerate-rotation event, far too
// weak for a p<0.01 rejection at that sample size); the success bar follows
// its sanctioned fallback of emitting a deviation artifact with the measured
// rates, and an informational line shows both bars holding at 2^15 sessions.

#include <sys/resource.h>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sasi/attack.hpp"
#include "sasi/sim.hpp"
#include "sasi/trace.hpp"

using namespace sasi;

namespace {

constexpr auto kModular = RotationVariant::Modular;
constexpr auto kHamming = RotationVariant::Hamming;
constexpr double kChi2Crit15 = 30.5779;  // p = 0.01, 15 dof

bool report_line(int criterion, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    return ok;
}

std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

TranscriptStream sim_stream(std::shared_ptr<SimulatedTag> tag) {
    return [tag]() -> std::optional<Transcript> { return tag->next(); };
}

// ---- criterion 1: protocol completeness --------------------------------

bool criterion1() {
    const int kSessions = 10000;
    for (auto variant : {kModular, kHamming}) {
        NonceSource setup{variant == kHamming ? 1002u : 1001u};
        TagIdentity id{setup.next_word()};
        PartyState reader{setup.next_word(), setup.next_word(), setup.next_word()};
        PartyState tag = reader;
        for (int i = 0; i < kSessions; ++i) {
            auto t = run_session(reader, tag, id, setup, variant);
            if (!t)
                return report_line(1, false,
                                   fmt("completeness: reject at session %d (%s)", i,
                                       variant_name(variant)));
            if (!(reader == tag))
                return report_line(1, false,
                                   fmt("completeness: state divergence at session %d (%s)",
                                       i, variant_name(variant)));
        }
    }
    return report_line(1, true,
                       fmt("completeness: 2 x %d sessions, zero rejects, states bit-identical",
                           kSessions));
}

// ---- criterion 2: probability table ------------------------------------

bool criterion2() {
    const uint64_t kTrials = 100000;
    struct Row {
        uint64_t n;
        double target;
        bool exact;     // zero failures demanded
        double tol;     // absolute tolerance when not exact
    };
    double sd106 = 3 * std::sqrt((2.0 / 106) * (1 - 2.0 / 106) / double(kTrials));
    double sd101 = 3 * std::sqrt((1.0 / 101) * (1 - 1.0 / 101) / double(kTrials));
    std::vector<Row> rows = {
        {128, 1.0, true, 0},    {64, 1.0, true, 0},     {96, 0.33, false, 0.01},
        {48, 0.33, false, 0.01}, {106, 2.0 / 106, false, sd106}, {101, 1.0 / 101, false, sd101},
    };
    std::string detail = "probability table:";
    bool ok = true;
    for (size_t i = 0; i < rows.size(); ++i) {
        double p = estimate_joint_probability(rows[i].n, kTrials, 2000 + uint64_t(i));
        bool row_ok = rows[i].exact ? p == rows[i].target
                                    : std::fabs(p - rows[i].target) <= rows[i].tol;
        ok = ok && row_ok;
        detail += fmt(" N=%" PRIu64 ":%.5f%s", rows[i].n, p, row_ok ? "" : "(!)");
    }
    return report_line(2, ok, detail + fmt(" (%" PRIu64 " trials each)", kTrials));
}

// ---- criterion 3: headline attack at 96 --------------------------------

bool criterion3() {
    const int kRuns = 10;
    int mod32_hits = 0, mod96_hits = 0;
    for (int r = 0; r < kRuns; ++r) {
        auto tag = std::make_shared<SimulatedTag>(SimulatedTag::from_seed(101 + r, kModular));
        uint64_t true96 = mod_small(tag->identity().id, 96);
        AttackConfig cfg;
        cfg.modulus = 96;
        cfg.session_budget = uint64_t(1) << 18;
        GuessReport rep = fig2_attack(sim_stream(tag), cfg);
        if (rep.guess && *rep.guess % 32 == true96 % 32) mod32_hits++;
        if (rep.guess && *rep.guess == true96) mod96_hits++;
    }
    bool ok = mod32_hits == kRuns;
    std::string detail = fmt(
        "attack at N=96, 2^18 sessions: guess = ID (mod 32) in %d/%d runs; "
        "exact mod-96 hits %d/%d (informational)",
        mod32_hits, kRuns, mod96_hits, kRuns);
    return report_line(3, ok, detail);
}

// ---- criterion 4: oracle-filtered recovery at 256 -----------------------

bool criterion4() {
    const int kRuns = 10;
    uint64_t min_obs = UINT64_MAX;
    for (int r = 0; r < kRuns; ++r) {
        SimulatedTag setup = SimulatedTag::from_seed(401 + r, kModular);
        DebugSecrets secrets{setup.identity(), setup.state()};
        AttackConfig cfg;
        cfg.modulus = 256;
        cfg.session_budget = uint64_t(1) << 25;
        cfg.seed = 9000 + uint64_t(r);
        cfg.variant = kModular;
        GuessReport rep = oracle_filtered_attack(cfg, secrets);
        uint64_t want = mod_small(setup.identity().id, 256);
        min_obs = std::min(min_obs, rep.useful_sessions);
        if (rep.useful_sessions < 20)
            return report_line(4, false,
                               fmt("oracle-filtered: run %d saw only %" PRIu64
                                   " true-precondition sessions (< 20)",
                                   r, rep.useful_sessions));
        if (!rep.guess || *rep.guess != want)
            return report_line(4, false, fmt("oracle-filtered: wrong guess in run %d", r));
        if (rep.histogram.counts[want] != rep.useful_sessions)
            return report_line(4, false,
                               fmt("oracle-filtered: votes not unanimous in run %d "
                                   "(%" PRIu64 "/%" PRIu64 ")",
                                   r, rep.histogram.counts[want], rep.useful_sessions));
    }
    return report_line(
        4, true,
        fmt("oracle-filtered at N=256: ID mod 256 unanimous in %d/%d runs "
            "(min observations %" PRIu64 ", budget 2^25)",
            kRuns, kRuns, min_obs));
}

// ---- criterion 5: general distribution attack --------------------------

struct DistRun {
    bool hit;
    double chi2;
    std::vector<uint64_t> counts;
};

DistRun dist_run(uint64_t seed, uint64_t budget) {
    auto tag = std::make_shared<SimulatedTag>(SimulatedTag::from_seed(seed, kModular));
    uint64_t want = mod_small(tag->identity().id, 16);
    GuessReport rep = distribution_attack(sim_stream(tag), 4, budget);
    return DistRun{rep.guess && *rep.guess == want, chi_square_uniform(rep.histogram),
                   rep.histogram.counts};
}

bool criterion5() {
    const int kRuns = 10;
    const uint64_t kBudget = uint64_t(1) << 10;
    int hits = 0, rejects = 0;
    nlohmann::ordered_json artifact;
    artifact["what"] =
        "distribution attack, modulus 16, budget 2^10 sessions: measured success "
        "rate and per-run histograms (deviation artifact for the 9/10 success bar)";
    artifact["chi_square_critical_p01_dof15"] = kChi2Crit15;
    auto runs_json = nlohmann::ordered_json::array();
    for (int r = 0; r < kRuns; ++r) {
        DistRun run = dist_run(501 + uint64_t(r), kBudget);
        hits += run.hit;
        rejects += run.chi2 > kChi2Crit15;
        nlohmann::ordered_json rj;
        rj["seed"] = 501 + r;
        rj["guess_correct"] = run.hit;
        rj["chi_square"] = run.chi2;
        rj["histogram"] = run.counts;
        runs_json.push_back(rj);
    }
    artifact["runs"] = runs_json;
    artifact["success_rate"] = fmt("%d/%d", hits, kRuns);
    artifact["chi_square_rejections"] = fmt("%d/%d", rejects, kRuns);

    // informational: the same experiment with a budget that the bias supports
    int hits15 = 0, rejects15 = 0;
    for (int r = 0; r < kRuns; ++r) {
        DistRun run = dist_run(601 + uint64_t(r), uint64_t(1) << 15);
        hits15 += run.hit;
        rejects15 += run.chi2 > kChi2Crit15;
    }
    artifact["informational_budget_2e15"] =
        fmt("success %d/%d, chi-square rejections %d/%d", hits15, kRuns, rejects15, kRuns);

    std::ofstream af("acceptance_deviation_distribution.json");
    af << artifact.dump(2) << '\n';
    af.close();

    // the 9/10 success bar may be replaced by the emitted deviation artifact;
    // the chi-square sub-bar has no such escape hatch
    bool success_bar = hits >= 9;
    bool chi_bar = rejects == kRuns;
    bool ok = chi_bar;
    std::string detail = fmt(
        "distribution attack (mod 16, 2^10 sessions): success %d/%d (bar 9/10%s), "
        "chi-square p<0.01 in %d/%d (need 10/10, no fallback); at 2^15: success %d/%d, "
        "chi-square %d/%d (informational)",
        hits, kRuns, success_bar ? "" : "; below bar, deviation artifact emitted",
        rejects, kRuns, hits15, kRuns, rejects15, kRuns);
    return report_line(5, ok, detail);
}

// ---- criterion 6: hamming negative control ------------------------------

bool criterion6() {
    const int kRuns = 20;
    int hits = 0;
    for (int r = 0; r < kRuns; ++r) {
        auto tag = std::make_shared<SimulatedTag>(SimulatedTag::from_seed(701 + r, kHamming));
        uint64_t true96 = mod_small(tag->identity().id, 96);
        AttackConfig cfg;
        cfg.modulus = 96;
        cfg.session_budget = uint64_t(1) << 18;
        cfg.variant = kHamming;
        GuessReport rep = fig2_attack(sim_stream(tag), cfg);
        if (rep.guess && *rep.guess == true96) hits++;
    }
    bool ok = hits <= 2;
    return report_line(6, ok,
                       fmt("hamming control: exact mod-96 recovery in %d/%d runs "
                           "(chance is about 1/96; need <= 2)",
                           hits, kRuns));
}

// ---- criterion 7: degenerate-rotation identities ------------------------

bool criterion7() {
    const int kSessions = 10000;
    NonceSource src{7007};
    u128 multiples = Word96::mask() / 96 + 1;
    for (int i = 0; i < kSessions; ++i) {
        Word96 k1{(src.next_word().v % multiples) * 96};
        Word96 k2{(src.next_word().v % multiples) * 96};
        PartyState st{src.next_word(), k1, k2};
        TagIdentity id{src.next_word()};
        Word96 n1 = src.next_word(), n2 = src.next_word();
        ChallengeResult ch = reader_challenge(st, id, n1, n2, kModular);
        auto resp = tag_process(st, id, ch.a, ch.b, ch.c, kModular);
        if (!resp) return report_line(7, false, fmt("degenerate: reject at %d", i));
        if (!(ch.secrets.k1bar == (k1 ^ n2)) || !(ch.secrets.k2bar == (k2 ^ n1)) ||
            !(resp->next.ids == ((st.ids + id.id) ^ k1)))
            return report_line(7, false, fmt("degenerate: identity broken at %d", i));
    }
    return report_line(
        7, true, fmt("degenerate-rotation identities exact in %d/%d forced sessions",
                     kSessions, kSessions));
}

// ---- criterion 8: worked example ----------------------------------------

bool criterion8() {
    PartyState st{Word96{3}, Word96{96}, Word96{192}};
    TagIdentity id{Word96{4}};
    ChallengeResult ch = reader_challenge(st, id, Word96{1}, Word96{2}, kModular);
    auto resp = tag_process(st, id, ch.a, ch.b, ch.c, kModular);
    bool ok = ch.a == Word96{98} && ch.b == Word96{197} && ch.c == Word96{323} &&
              resp.has_value() && resp->d == Word96{39} && resp->next.ids == Word96{103};
    Transcript t{st.ids, ch.a, ch.b, ch.c, resp ? resp->d : Word96{},
                 resp ? resp->next.ids : Word96{}};
    ok = ok && !detect_condition(t, 96) && detect_condition(t, 32);
    return report_line(8, ok,
                       "worked example: A=98 B=197 C=323 D=39 IDS'=103, condition "
                       "false at 96 / true at 32");
}

// ---- criterion 9: trace round-trip, bounded memory ----------------------

long max_rss_kb() {
    struct rusage ru;
    getrusage(RUSAGE_SELF, &ru);
    return ru.ru_maxrss;
}

bool criterion9() {
    const uint64_t kSessions = uint64_t(1) << 18;
    const char* path = "acceptance_trace.tmp";
    uint64_t write_hash = 0, read_hash = 0;
    auto mix = [](uint64_t& h, Word96 w) {
        h = NonceSource::mix(h ^ uint64_t(w.v)) ^ NonceSource::mix(uint64_t(w.v >> 64));
    };
    Word96 final_written;
    {
        SimulatedTag tag = SimulatedTag::from_seed(909, kModular);
        std::ofstream out(path);
        TraceWriter w(out, TraceHeader{});
        for (uint64_t i = 0; i < kSessions; ++i) {
            Transcript t = tag.next();
            w.add(SessionRecord{i, t.ids, t.a, t.b, t.c, t.d});
            mix(write_hash, t.ids);
            mix(write_hash, t.a);
            mix(write_hash, t.b);
            mix(write_hash, t.c);
            mix(write_hash, t.d);
        }
        final_written = tag.state().ids;
        w.finish(final_written);
    }
    long rss_before = max_rss_kb();
    uint64_t count = 0;
    Word96 final_read;
    {
        std::ifstream in(path);
        TraceReader r(in);
        while (auto rec = r.next()) {
            mix(read_hash, rec->ids);
            mix(read_hash, rec->a);
            mix(read_hash, rec->b);
            mix(read_hash, rec->c);
            mix(read_hash, rec->d);
            count++;
        }
        final_read = r.final_ids();
    }
    long rss_growth = max_rss_kb() - rss_before;
    std::remove(path);
    bool identity = count == kSessions && read_hash == write_hash && final_read == final_written;
    bool bounded = rss_growth <= 8 * 1024;  // streaming read must not buffer the trace
    return report_line(
        9, identity && bounded,
        fmt("trace round-trip: 2^18 records streamed back %s, final IDS %s, peak-RSS "
            "growth during read %ld KiB (<= 8192 required)",
            identity ? "identically" : "WRONG", final_read == final_written ? "ok" : "WRONG",
            rss_growth));
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    bool (*checks[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                          criterion6, criterion7, criterion8, criterion9};
    bool all_ok = true;
    for (int c = 1; c <= 9; ++c) {
        if (only != 0 && only != c) continue;
        all_ok = checks[c - 1]() && all_ok;
    }
    return all_ok ? 0 : 1;
}
