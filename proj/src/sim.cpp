#include "sasi/sim.hpp"

#include <stdexcept>

namespace sasi {

SimulatedTag SimulatedTag::from_seed(uint64_t seed, RotationVariant variant) {
    NonceSource src{seed};
    TagIdentity id{src.next_word()};
    PartyState state{src.next_word(), src.next_word(), src.next_word()};
    return SimulatedTag(id, state, src, variant);
}

Transcript SimulatedTag::next() {
    Word96 n1 = rng_.next_word();
    Word96 n2 = rng_.next_word();
    ChallengeResult ch = reader_challenge(state_, id_, n1, n2, variant_);
    std::optional<TagResponse> resp = tag_process(state_, id_, ch.a, ch.b, ch.c, variant_);
    if (!resp) throw std::logic_error("honest session rejected");  // unreachable
    Transcript t{state_.ids, ch.a, ch.b, ch.c, resp->d, resp->next.ids};
    state_ = resp->next;
    return t;
}

}  // namespace sasi
