#pragma once

#include "rbis/errors.hpp"
#include "rbis/estimator.hpp"
#include "rbis/time.hpp"

namespace rbis {

/// Wired reference from the master UE to a TSN grandmaster, tracked with the
/// same estimator as the wireless hop. Tuples pair the grandmaster timestamp
/// (master side) with the master UE's local timestamp (slave side).
struct GrandmasterLink {
    SyncState gm_state;
    TimeSpan wired_noise_sigma;

    GrandmasterLink() = default;

    explicit GrandmasterLink(FilterConfig filter, TimeSpan noise_sigma = TimeSpan())
        : gm_state(filter), wired_noise_sigma(noise_sigma) {}
};

/// Feeds one wired tuple into the grandmaster link.
inline void gm_ingest(GrandmasterLink& link, const TimestampTuple& tuple) {
    link.gm_state.update(tuple);
}

/// Translates a slave-local reading into grandmaster time by composing two
/// corrections: slave-local -> master-local, then master-local -> grandmaster.
/// Each stage is solved to 1 ps.
inline Instant slave_to_grandmaster(const SyncState& slave_state, const GrandmasterLink& link,
                                    Instant slave_local) {
    if (!slave_state.last_offset())
        throw UninitializedError("slave_to_grandmaster: slave stage has no tuple yet");
    if (!link.gm_state.last_offset())
        throw UninitializedError("slave_to_grandmaster: grandmaster stage has no tuple yet");
    const Instant master_local = slave_state.corrected_local_time(slave_local);
    return link.gm_state.corrected_local_time(master_local);
}

} // namespace rbis
