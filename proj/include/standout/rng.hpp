#pragma once

#include <cstdint>

namespace standout {

/// Counter-based stream: SplitMix64 output on a counter keyed by (seed, stream, substream).
/// Two streams with different keys are independent for practical purposes, so per-session
/// draws do not depend on how sessions are distributed across workers.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace standout
