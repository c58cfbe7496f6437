#pragma once

#include <cstdint>

#include "sasi/nonce.hpp"
#include "sasi/protocol.hpp"

namespace sasi {

// Experiment plumbing: one honest reader/tag pair driven from a seed.
// Secrets are initialized by drawing ID, IDS, K1, K2 from the source in that
// order; each next() runs one successful session and links ids_next itself.
class SimulatedTag {
  public:
    SimulatedTag(const TagIdentity& id, const PartyState& state, NonceSource rng,
                 RotationVariant variant)
        : id_(id), state_(state), rng_(rng), variant_(variant) {}

    static SimulatedTag from_seed(uint64_t seed, RotationVariant variant);

    Transcript next();

    const PartyState& state() const { return state_; }
    const TagIdentity& identity() const { return id_; }
    RotationVariant variant() const { return variant_; }

  private:
    TagIdentity id_;
    PartyState state_;
    NonceSource rng_;
    RotationVariant variant_;
};

}  // namespace sasi
