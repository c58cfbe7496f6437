// Python bindings for the protocol simulator and the passive attacks.
// Word96 converts to/from arbitrary-precision Python ints (range-checked);
// transcripts cross the boundary as plain lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "sasi/attack.hpp"
#include "sasi/sim.hpp"
#include "sasi/trace.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace sasi;

namespace {

Word96 word_from_pyint(py::handle h) {
    if (!PyLong_Check(h.ptr())) throw py::type_error("Word96 expects an int");
    py::object sixty_four = py::reinterpret_steal<py::object>(PyLong_FromLong(64));
    py::object hi_obj =
        py::reinterpret_steal<py::object>(PyNumber_Rshift(h.ptr(), sixty_four.ptr()));
    if (!hi_obj) throw py::error_already_set();
    unsigned long long hi = PyLong_AsUnsignedLongLong(hi_obj.ptr());
    if (PyErr_Occurred()) {
        PyErr_Clear();
        throw py::value_error("Word96 value must be in [0, 2**96)");
    }
    if (hi >> 32) throw py::value_error("Word96 value must be in [0, 2**96)");
    py::object mask =
        py::reinterpret_steal<py::object>(PyLong_FromUnsignedLongLong(~0ULL));
    py::object lo_obj = py::reinterpret_steal<py::object>(PyNumber_And(h.ptr(), mask.ptr()));
    if (!lo_obj) throw py::error_already_set();
    unsigned long long lo = PyLong_AsUnsignedLongLong(lo_obj.ptr());
    return Word96{(u128(hi) << 64) | u128(lo)};
}

py::object word_to_pyint(const Word96& w) {
    py::object hi = py::reinterpret_steal<py::object>(
        PyLong_FromUnsignedLongLong(uint64_t(w.v >> 64)));
    py::object lo = py::reinterpret_steal<py::object>(
        PyLong_FromUnsignedLongLong(uint64_t(w.v)));
    py::object sixty_four = py::reinterpret_steal<py::object>(PyLong_FromLong(64));
    py::object shifted =
        py::reinterpret_steal<py::object>(PyNumber_Lshift(hi.ptr(), sixty_four.ptr()));
    return py::reinterpret_steal<py::object>(PyNumber_Or(shifted.ptr(), lo.ptr()));
}

TranscriptStream stream_of(const std::vector<Transcript>& ts, size_t& cursor) {
    return [&ts, &cursor]() -> std::optional<Transcript> {
        if (cursor >= ts.size()) return std::nullopt;
        return ts[cursor++];
    };
}

}  // namespace

PYBIND11_MODULE(sasikit, m) {
    m.doc() = "SASI mutual-authentication simulator and passive full-disclosure attacks";

    py::register_exception<TraceError>(m, "TraceError");

    py::enum_<RotationVariant>(m, "RotationVariant")
        .value("MODULAR", RotationVariant::Modular)
        .value("HAMMING", RotationVariant::Hamming);

    py::class_<Word96>(m, "Word96")
        .def(py::init([]() { return Word96{0}; }))
        .def(py::init(&word_from_pyint), "value"_a)
        .def("__int__", &word_to_pyint)
        .def("__index__", &word_to_pyint)
        .def("hex", [](const Word96& w) { return to_hex(w); })
        .def_static("from_hex", &from_hex, "digits"_a)
        .def("xor", [](Word96 a, Word96 b) { return a ^ b; }, "other"_a)
        .def("add_mod", [](Word96 a, Word96 b) { return a + b; }, "other"_a)
        .def("sub_mod", [](Word96 a, Word96 b) { return a - b; }, "other"_a)
        .def("bitor", [](Word96 a, Word96 b) { return a | b; }, "other"_a)
        .def("rot", [](Word96 x, Word96 b, RotationVariant v) { return rot(x, b, v); },
             "amount"_a, "variant"_a = RotationVariant::Modular)
        .def("hamming_weight", [](Word96 w) { return hamming_weight(w); })
        .def("mod", [](Word96 w, uint64_t n) { return mod_small(w, n); }, "n"_a)
        .def("__eq__", [](Word96 a, Word96 b) { return a == b; }, py::is_operator())
        .def("__ne__", [](Word96 a, Word96 b) { return a != b; }, py::is_operator())
        .def("__hash__", [](Word96 w) { return uint64_t(w.v) ^ uint64_t(w.v >> 64); })
        .def("__repr__", [](const Word96& w) { return "Word96(0x" + to_hex(w) + ")"; });
    py::implicitly_convertible<py::int_, Word96>();

    py::class_<NonceSource>(m, "NonceSource")
        .def(py::init([](uint64_t seed) { return NonceSource{seed}; }), "seed"_a)
        .def("next_u64", &NonceSource::next_u64)
        .def("next_word", &NonceSource::next_word);

    py::class_<TagIdentity>(m, "TagIdentity")
        .def(py::init([](Word96 id) { return TagIdentity{id}; }), "id"_a)
        .def_readwrite("id", &TagIdentity::id);

    py::class_<PartyState>(m, "PartyState")
        .def(py::init([](Word96 ids, Word96 k1, Word96 k2) {
                 return PartyState{ids, k1, k2};
             }),
             "ids"_a, "k1"_a, "k2"_a)
        .def_readwrite("ids", &PartyState::ids)
        .def_readwrite("k1", &PartyState::k1)
        .def_readwrite("k2", &PartyState::k2)
        .def("__eq__", [](const PartyState& a, const PartyState& b) { return a == b; },
             py::is_operator());

    py::class_<SessionSecrets>(m, "SessionSecrets")
        .def_readonly("n1", &SessionSecrets::n1)
        .def_readonly("n2", &SessionSecrets::n2)
        .def_readonly("k1bar", &SessionSecrets::k1bar)
        .def_readonly("k2bar", &SessionSecrets::k2bar);

    py::class_<Transcript>(m, "Transcript")
        .def(py::init([](Word96 ids, Word96 a, Word96 b, Word96 c, Word96 d,
                         Word96 ids_next) {
                 return Transcript{ids, a, b, c, d, ids_next};
             }),
             "ids"_a, "a"_a, "b"_a, "c"_a, "d"_a, "ids_next"_a)
        .def_readwrite("ids", &Transcript::ids)
        .def_readwrite("a", &Transcript::a)
        .def_readwrite("b", &Transcript::b)
        .def_readwrite("c", &Transcript::c)
        .def_readwrite("d", &Transcript::d)
        .def_readwrite("ids_next", &Transcript::ids_next);

    py::class_<ChallengeResult>(m, "ChallengeResult")
        .def_readonly("a", &ChallengeResult::a)
        .def_readonly("b", &ChallengeResult::b)
        .def_readonly("c", &ChallengeResult::c)
        .def_readonly("secrets", &ChallengeResult::secrets);

    py::class_<TagResponse>(m, "TagResponse")
        .def_readonly("d", &TagResponse::d)
        .def_readonly("next", &TagResponse::next);

    m.def("reader_challenge", &reader_challenge, "state"_a, "id"_a, "n1"_a, "n2"_a,
          "variant"_a);
    m.def("tag_process", &tag_process, "state"_a, "id"_a, "a"_a, "b"_a, "c"_a, "variant"_a);
    m.def("reader_verify_and_update", &reader_verify_and_update, "state"_a, "id"_a,
          "secrets"_a, "d"_a, "variant"_a);
    m.def(
        "run_session",
        [](PartyState& reader, PartyState& tag, TagIdentity id, NonceSource& src,
           RotationVariant v) { return run_session(reader, tag, id, src, v); },
        "reader"_a, "tag"_a, "id"_a, "nonces"_a, "variant"_a);

    py::class_<SimulatedTag>(m, "SimulatedTag")
        .def_static("from_seed", &SimulatedTag::from_seed, "seed"_a,
                    "variant"_a = RotationVariant::Modular)
        .def("next", &SimulatedTag::next)
        .def("state", &SimulatedTag::state)
        .def("identity", &SimulatedTag::identity)
        .def("variant", &SimulatedTag::variant);

    m.def(
        "simulate_transcripts",
        [](uint64_t seed, uint64_t sessions, RotationVariant v) {
            SimulatedTag tag = SimulatedTag::from_seed(seed, v);
            std::vector<Transcript> out;
            out.reserve(sessions);
            for (uint64_t i = 0; i < sessions; ++i) out.push_back(tag.next());
            return out;
        },
        "seed"_a, "sessions"_a, "variant"_a = RotationVariant::Modular);

    // attacks
    py::class_<ObservationHistogram>(m, "ObservationHistogram")
        .def_readonly("counts", &ObservationHistogram::counts)
        .def_readonly("total", &ObservationHistogram::total);

    py::class_<GuessReport>(m, "GuessReport")
        .def_readonly("guess", &GuessReport::guess)
        .def_readonly("histogram", &GuessReport::histogram)
        .def_readonly("useful_sessions", &GuessReport::useful_sessions)
        .def_readonly("sessions_consumed", &GuessReport::sessions_consumed);

    py::enum_<ModulusKind>(m, "ModulusKind")
        .value("POWER_OF_TWO", ModulusKind::PowerOfTwo)
        .value("THREE_TIMES_POWER_OF_TWO", ModulusKind::ThreeTimesPowerOfTwo)
        .value("FOUR_T_PLUS_TEN", ModulusKind::FourTPlusTen)
        .value("TWO_T_PLUS_FIVE", ModulusKind::TwoTPlusFive)
        .value("UNCOVERED", ModulusKind::Uncovered);

    py::class_<ModulusClass>(m, "ModulusClass")
        .def_readonly("kind", &ModulusClass::kind)
        .def_readonly("t", &ModulusClass::t)
        .def("__eq__", [](ModulusClass a, ModulusClass b) { return a == b; },
             py::is_operator());

    m.def("detect_condition", &detect_condition, "transcript"_a, "n"_a);
    m.def("delta_residue", &delta_residue, "transcript"_a, "n"_a);
    m.def("classify_modulus", &classify_modulus, "n"_a);
    m.def(
        "theoretical_probability",
        [](uint64_t n) { return theoretical_probability(classify_modulus(n), n); }, "n"_a);
    m.def("estimate_joint_probability", &estimate_joint_probability, "n"_a, "trials"_a,
          "seed"_a = 0);
    m.def("chi_square_uniform", &chi_square_uniform, "histogram"_a);

    m.def(
        "fig2_attack",
        [](const std::vector<Transcript>& ts, uint64_t modulus, uint64_t budget,
           RotationVariant variant) {
            AttackConfig cfg;
            cfg.modulus = modulus;
            cfg.session_budget = budget;
            cfg.variant = variant;
            size_t cursor = 0;
            TranscriptStream s = stream_of(ts, cursor);
            return fig2_attack(s, cfg);
        },
        "transcripts"_a, "modulus"_a = 96, "budget"_a = (uint64_t(1) << 18),
        "variant"_a = RotationVariant::Modular);

    m.def(
        "distribution_attack",
        [](const std::vector<Transcript>& ts, unsigned k, uint64_t budget) {
            size_t cursor = 0;
            TranscriptStream s = stream_of(ts, cursor);
            return distribution_attack(s, k, budget);
        },
        "transcripts"_a, "k"_a = 5, "budget"_a = (uint64_t(1) << 18));

    m.def("report_json", &report_json, "report"_a, "modulus"_a, "variant"_a);

    // trace files
    m.def(
        "load_trace",
        [](const std::string& path) {
            std::ifstream in(path);
            if (!in) throw py::value_error("cannot open '" + path + "'");
            TraceReader reader(in);
            TranscriptLinker link(reader);
            std::vector<Transcript> out;
            while (auto t = link.next()) out.push_back(*t);
            return py::make_tuple(reader.header().variant, reader.header().seed_note, out,
                                  reader.final_ids());
        },
        "path"_a, "returns (variant, note, transcripts, final_ids)");

    m.def(
        "save_trace",
        [](const std::string& path, RotationVariant variant,
           const std::vector<Transcript>& ts, Word96 final_ids, const std::string& note) {
            std::ofstream out(path);
            if (!out) throw py::value_error("cannot open '" + path + "'");
            TraceHeader header;
            header.variant = variant;
            header.seed_note = note;
            TraceWriter w(out, header);
            for (size_t i = 0; i < ts.size(); ++i)
                w.add(SessionRecord{i, ts[i].ids, ts[i].a, ts[i].b, ts[i].c, ts[i].d});
            w.finish(final_ids);
        },
        "path"_a, "variant"_a, "transcripts"_a, "final_ids"_a, "note"_a = "");
}
