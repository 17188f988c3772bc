#pragma once

// Counter-based random number generation.
//
// A Philox4x32-10 block cipher (Salmon et al., SC 2011) drives every random
// draw in the library. Streams are identified by a (key, stream-id) pair
// derived from a 64-bit master seed and a path of integer labels, so any
// replicate of any experiment can be handed its own statistically
// independent substream whose output depends only on (seed, labels) — never
// on scheduling or worker count. The mapping from (seed, labels) to stream
// output is part of the reproducibility contract and must not change.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace wboot {

namespace detail {

inline constexpr std::uint32_t philox_m0 = 0xD2511F53u;
inline constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
inline constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
inline constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

struct PhiloxBlock {
    std::uint32_t v[4];
};

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(philox_m0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(philox_m1) * ctr[2];
    const std::uint32_t out0 = static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0];
    const std::uint32_t out1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t out2 = static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1];
    const std::uint32_t out3 = static_cast<std::uint32_t>(p0);
    ctr[0] = out0;
    ctr[1] = out1;
    ctr[2] = out2;
    ctr[3] = out3;
}

// Ten rounds with the Weyl key schedule; counter and key are caller-owned.
inline PhiloxBlock philox4x32_10(const std::uint32_t counter[4], const std::uint32_t key[2]) {
    PhiloxBlock out{{counter[0], counter[1], counter[2], counter[3]}};
    std::uint32_t k[2] = {key[0], key[1]};
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += philox_w0;
            k[1] += philox_w1;
        }
        philox_round(out.v, k);
    }
    return out;
}

// splitmix64 finaliser: a 64->64 bijection with full avalanche.
inline std::uint64_t fmix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// Absorb one 64-bit word into a running label-path digest.
inline std::uint64_t absorb(std::uint64_t chain, std::uint64_t x) {
    return fmix64(chain ^ (x * 0xFF51AFD7ED558CCDull + 0x9E3779B97F4A7C15ull));
}

}  // namespace detail

// A deterministic stream of random numbers addressed by (master seed, label
// path). Copying a stream copies its position; child() derives a fresh,
// independent stream by extending the label path.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t master_seed,
                          std::initializer_list<std::uint64_t> labels = {})
        : RandomStream(master_seed, std::vector<std::uint64_t>(labels)) {}

    RandomStream(std::uint64_t master_seed, const std::vector<std::uint64_t>& labels) {
        chain_ = detail::fmix64(master_seed ^ 0x57424F4F54524E47ull);  // "WBOOTRNG"
        chain_ = detail::absorb(chain_, static_cast<std::uint64_t>(labels.size()));
        for (std::uint64_t label : labels) chain_ = detail::absorb(chain_, label);
        rekey();
    }

    // Independent substream one level deeper in the label tree.
    RandomStream child(std::uint64_t label) const {
        RandomStream c(*this);
        c.chain_ = detail::absorb(chain_, label);
        c.rekey();
        return c;
    }

    std::uint32_t next_u32() {
        if (index_ == 4) refill();
        return buffer_.v[index_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double u01() {
        const std::uint64_t bits = next_u64() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    // Standard exponential by inversion.
    double exponential() { return -std::log(u01()); }

    // Standard normal via Box-Muller (one value per uniform pair, no cached
    // spare, so the draw sequence depends only on call order).
    double normal() {
        const double u1 = u01();
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    void rekey() {
        const std::uint64_t k = detail::fmix64(chain_ ^ 0x4B455953ull);  // "KEYS"
        const std::uint64_t s = detail::fmix64(chain_ ^ 0x53494453ull);  // "SIDS"
        key_[0] = static_cast<std::uint32_t>(k);
        key_[1] = static_cast<std::uint32_t>(k >> 32);
        stream_id_[0] = static_cast<std::uint32_t>(s);
        stream_id_[1] = static_cast<std::uint32_t>(s >> 32);
        block_ = 0;
        index_ = 4;
    }

    void refill() {
        const std::uint32_t counter[4] = {static_cast<std::uint32_t>(block_),
                                          static_cast<std::uint32_t>(block_ >> 32),
                                          stream_id_[0], stream_id_[1]};
        buffer_ = detail::philox4x32_10(counter, key_);
        ++block_;
        index_ = 0;
    }

    std::uint64_t chain_ = 0;
    std::uint32_t key_[2] = {0, 0};
    std::uint32_t stream_id_[2] = {0, 0};
    std::uint64_t block_ = 0;
    detail::PhiloxBlock buffer_{{0, 0, 0, 0}};
    int index_ = 4;
};

// Stable mapping from (master seed, label path) to an independent substream.
inline RandomStream derive_substream(std::uint64_t master_seed,
                                     const std::vector<std::uint64_t>& labels) {
    if (labels.empty()) throw std::invalid_argument("derive_substream: label path must be non-empty");
    return RandomStream(master_seed, labels);
}

inline RandomStream derive_substream(std::uint64_t master_seed,
                                     std::initializer_list<std::uint64_t> labels) {
    return derive_substream(master_seed, std::vector<std::uint64_t>(labels));
}

}  // namespace wboot
