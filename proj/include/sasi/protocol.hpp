#pragma once

#include <optional>

#include "sasi/nonce.hpp"
#include "sasi/word96.hpp"

namespace sasi {

// The tag's static private identifier; never transmitted, never updated.
struct TagIdentity {
    Word96 id;
};

// Per-party secrets: index pseudonym and the two shared keys. Reader and tag
// copies are bit-identical after every successful session.
struct PartyState {
    Word96 ids, k1, k2;

    friend constexpr bool operator==(const PartyState& a, const PartyState& b) {
        return a.ids == b.ids && a.k1 == b.k1 && a.k2 == b.k2;
    }
};

// Session-local values: the two nonces and the rotated keys
//   K1* = Rot(K1 xor n2, K1),  K2* = Rot(K2 xor n1, K2).
struct SessionSecrets {
    Word96 n1, n2, k1bar, k2bar;
};

// One eavesdropped session as seen on the radio channel. ids_next is the
// pseudonym announced at the start of the following session; the trace layer
// fills it by linking consecutive records.
struct Transcript {
    Word96 ids, a, b, c, d, ids_next;
};

struct ChallengeResult {
    Word96 a, b, c;
    SessionSecrets secrets;
};

struct TagResponse {
    Word96 d;
    PartyState next;
};

//   A = IDS xor K1 xor n1
//   B = (IDS or K2) + n2
//   C = (K1 xor K2*) + (K2 xor K1*)
ChallengeResult reader_challenge(const PartyState& state, const TagIdentity& id,
                                 Word96 n1, Word96 n2, RotationVariant variant);

// Tag recovers n1 = A xor IDS xor K1 and n2 = B - (IDS or K2), recomputes C
// and rejects on mismatch; otherwise answers
//   D = (K2* + ID) xor ((K1 xor K2) or K1*)
// and steps to IDS' = (IDS + ID) xor (n2 xor K1*), K1' = K1*, K2' = K2*.
// State is untouched on reject.
std::optional<TagResponse> tag_process(const PartyState& state, const TagIdentity& id,
                                       Word96 a, Word96 b, Word96 c,
                                       RotationVariant variant);

// Reader checks D against its local computation and applies the same update.
std::optional<PartyState> reader_verify_and_update(const PartyState& state,
                                                   const TagIdentity& id,
                                                   const SessionSecrets& secrets,
                                                   Word96 d, RotationVariant variant);

// Full honest exchange between synchronized parties; draws n1, n2 from src.
// Mutates both states on success. The returned transcript has ids_next = 0;
// linking to the following session is the trace layer's job.
std::optional<Transcript> run_session(PartyState& reader, PartyState& tag,
                                      const TagIdentity& id, NonceSource& src,
                                      RotationVariant variant);

}  // namespace sasi
