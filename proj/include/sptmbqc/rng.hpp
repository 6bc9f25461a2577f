#pragma once

#include <array>
#include <cstdint>

namespace sptmbqc {

// Philox4x32-10 counter-based generator. State is (seed, stream, counter);
// jumping to any counter value is O(1), so independent streams for parallel
// Monte Carlo are just distinct stream ids under the same seed. Every
// stochastic result records its seed, making reruns bit-identical.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint32_t next_u32() {
        if (buf_pos_ == 4) refill();
        return buf_[buf_pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    void refill() {
        std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block_),
            static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_),
            static_cast<std::uint32_t>(stream_ >> 32),
        };
        std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = 0xD2511F53ull * ctr[0];
            std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
            std::array<std::uint32_t, 4> next = {
                static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
                static_cast<std::uint32_t>(p0),
            };
            ctr = next;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_ = ctr;
        buf_pos_ = 0;
        ++block_;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
};

} // namespace sptmbqc
