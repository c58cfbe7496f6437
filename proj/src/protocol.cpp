#include "sasi/protocol.hpp"

namespace sasi {

namespace {

SessionSecrets derive_secrets(const PartyState& s, Word96 n1, Word96 n2,
                              RotationVariant variant) {
    return SessionSecrets{n1, n2, rot(s.k1 ^ n2, s.k1, variant),
                          rot(s.k2 ^ n1, s.k2, variant)};
}

Word96 compute_c(const PartyState& s, const SessionSecrets& sec) {
    return (s.k1 ^ sec.k2bar) + (s.k2 ^ sec.k1bar);
}

Word96 compute_d(const PartyState& s, const TagIdentity& id, const SessionSecrets& sec) {
    return (sec.k2bar + id.id) ^ ((s.k1 ^ s.k2) | sec.k1bar);
}

PartyState updated_state(const PartyState& s, const TagIdentity& id,
                         const SessionSecrets& sec) {
    return PartyState{(s.ids + id.id) ^ (sec.n2 ^ sec.k1bar), sec.k1bar, sec.k2bar};
}

}  // namespace

ChallengeResult reader_challenge(const PartyState& state, const TagIdentity& /*id*/,
                                 Word96 n1, Word96 n2, RotationVariant variant) {
    SessionSecrets sec = derive_secrets(state, n1, n2, variant);
    Word96 a = state.ids ^ state.k1 ^ n1;
    Word96 b = (state.ids | state.k2) + n2;
    return ChallengeResult{a, b, compute_c(state, sec), sec};
}

std::optional<TagResponse> tag_process(const PartyState& state, const TagIdentity& id,
                                       Word96 a, Word96 b, Word96 c,
                                       RotationVariant variant) {
    Word96 n1 = a ^ state.ids ^ state.k1;
    Word96 n2 = b - (state.ids | state.k2);
    SessionSecrets sec = derive_secrets(state, n1, n2, variant);
    if (compute_c(state, sec) != c) return std::nullopt;
    return TagResponse{compute_d(state, id, sec), updated_state(state, id, sec)};
}

std::optional<PartyState> reader_verify_and_update(const PartyState& state,
                                                   const TagIdentity& id,
                                                   const SessionSecrets& secrets,
                                                   Word96 d, RotationVariant /*variant*/) {
    if (compute_d(state, id, secrets) != d) return std::nullopt;
    return updated_state(state, id, secrets);
}

std::optional<Transcript> run_session(PartyState& reader, PartyState& tag,
                                      const TagIdentity& id, NonceSource& src,
                                      RotationVariant variant) {
    Word96 n1 = src.next_word();
    Word96 n2 = src.next_word();
    ChallengeResult ch = reader_challenge(reader, id, n1, n2, variant);
    std::optional<TagResponse> resp = tag_process(tag, id, ch.a, ch.b, ch.c, variant);
    if (!resp) return std::nullopt;
    std::optional<PartyState> rnext =
        reader_verify_and_update(reader, id, ch.secrets, resp->d, variant);
    if (!rnext) return std::nullopt;
    Transcript t{reader.ids, ch.a, ch.b, ch.c, resp->d, Word96{}};
    reader = *rnext;
    tag = resp->next;
    return t;
}

}  // namespace sasi
