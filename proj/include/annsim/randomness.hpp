#pragma once

#include <cstdint>

namespace annsim {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). The constants are part of
/// the reproducibility contract: golden transcripts and CSV files depend on them.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Order-sensitive combination of a key with one more word.
constexpr std::uint64_t mix_key(std::uint64_t key, std::uint64_t value) {
    return mix64(key ^ mix64(value + kGolden));
}

/// Output number `counter` of the SplitMix64 stream whose state starts at `key`.
constexpr std::uint64_t stream_word(std::uint64_t key, std::uint64_t counter) {
    return mix64(key + (counter + 1) * kGolden);
}

/// Domain tags separate the streams drawn from one coin.
enum class CoinDomain : std::uint64_t {
    main_sketch = 0x6d61696e,  // "main"
    aux_sketch = 0x61757869,   // "auxi"
    raw = 0x72617762,          // "rawb"
};

/// The public coin: a seed shared by the table builder and the querier. Every
/// derived bit is a pure function of (seed, domain, scale, row, column), so any
/// entry can be recomputed without generating its predecessors.
class PublicCoin {
public:
    constexpr explicit PublicCoin(std::uint64_t seed) : seed_(seed) {}

    constexpr std::uint64_t seed() const { return seed_; }

    /// Key of the stream for one matrix row.
    constexpr std::uint64_t row_key(CoinDomain domain, int scale, std::uint64_t row) const {
        return mix_key(mix_key(mix_key(seed_, static_cast<std::uint64_t>(domain)), static_cast<std::uint64_t>(scale)),
                       row);
    }

    /// 64 raw bits at position `block` of the (domain, scale, row) stream.
    constexpr std::uint64_t block(CoinDomain domain, int scale, std::uint64_t row, std::uint64_t block) const {
        return stream_word(row_key(domain, scale, row), block);
    }

    friend constexpr bool operator==(const PublicCoin&, const PublicCoin&) = default;

private:
    std::uint64_t seed_;
};

/// Independent coin for one (trial, repetition) pair of an experiment.
constexpr PublicCoin coin_for_trial(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t rep) {
    return PublicCoin(mix_key(mix_key(mix_key(master_seed, 0x636f696e /* "coin" */), trial), rep));
}

/// 53-bit uniform in [0, 1) from a raw word.
constexpr double unit_double(std::uint64_t word) { return static_cast<double>(word >> 11) * 0x1.0p-53; }

/// Integer threshold t such that `(word >> 11) < t` holds with probability p.
std::uint64_t bernoulli_threshold(double p);

}  // namespace annsim
