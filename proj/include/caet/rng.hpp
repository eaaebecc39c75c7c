#pragma once
#include <cstdint>

namespace caet {

// Counter-based stream built on Philox4x32-10 (Salmon et al., SC 2011).
// A stream is keyed by (seed, stream id); every draw is a pure function of
// the key and a draw counter, so streams can be handed to workers in any
// order and still reproduce bit-identical observation sequences.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    double uniform01();                       // [0, 1), 53-bit resolution
    double gaussian(double mean, double sd);  // Box-Muller, consumes 2 uniforms
    bool bernoulli(double p) { return uniform01() < p; }
    std::uint64_t next_u64();

private:
    void refill();

    std::uint32_t key_[2];
    std::uint64_t block_ = 0;  // philox counter, advanced once per block
    std::uint64_t out_[2];
    int avail_ = 0;
};

// SplitMix64 finalizer; used to whiten key material.
std::uint64_t mix64(std::uint64_t x);

}  // namespace caet
