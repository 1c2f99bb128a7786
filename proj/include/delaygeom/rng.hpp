#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace delaygeom
{

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 block function.
 */
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key)
{
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round)
    {
        std::uint64_t p0 = std::uint64_t(m0) * ctr[0];
        std::uint64_t p1 = std::uint64_t(m1) * ctr[2];
        auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        auto lo0 = static_cast<std::uint32_t>(p0);
        auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

//---------------------------------------------------------------------------//
/*!
 * Counter-based stream keyed by (seed, purpose, index).
 *
 * Distinct (purpose, index) pairs give independent streams; each stream
 * yields 2^32 blocks of four 32-bit words.
 */
class CounterRng
{
  public:
    CounterRng(std::uint64_t seed, std::uint32_t purpose, std::uint64_t index)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          purpose_(purpose),
          index_(index)
    {
    }

    std::uint32_t next_u32()
    {
        if (used_ == 4)
        {
            block_ = philox4x32({counter_, purpose_, static_cast<std::uint32_t>(index_),
                                 static_cast<std::uint32_t>(index_ >> 32)},
                                key_);
            ++counter_;
            used_ = 0;
        }
        return block_[used_++];
    }

    // Uniform on the open interval (0, 1) with 53 random bits.
    double uniform()
    {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    // Unit-mean exponential.
    double exponential() { return -std::log(uniform()); }

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t purpose_;
    std::uint64_t index_;
    std::uint32_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
};

} // namespace delaygeom
