#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace xcross {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). One instance serves one
// stream: the key holds the run seed, counter words 2 and 3 hold the stream id, and words
// 0 and 1 count blocks within the stream.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;
    using result_type = std::uint64_t;

    static Block generate(Block ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_{static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (used_ == 2) refill();
        const result_type r = (std::uint64_t{buffer_[2 * used_]} << 32) | buffer_[2 * used_ + 1];
        ++used_;
        return r;
    }

    // Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

private:
    void refill() {
        buffer_ = generate({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_[0],
                            stream_[1]},
                           key_);
        ++block_;
        used_ = 0;
    }

    Key key_;
    std::array<std::uint32_t, 2> stream_;
    std::uint64_t block_ = 0;
    Block buffer_{};
    int used_ = 2;
};

}  // namespace xcross
