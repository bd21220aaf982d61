#pragma once
#include <cstdint>

namespace dbvn {

// splitmix64 finalizer (Vigna). Used both as a mixing function for
// seed-splitting and to expand a 64-bit seed into generator state.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Sub-stream seed for (master seed, stream index). This is the documented
// mixing function: stream k draws its seed from splitmix64 applied to
// seed + (k+1) * golden-ratio constant.
inline uint64_t substream_seed(uint64_t seed, uint64_t stream) {
    uint64_t s = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
    return splitmix64(s);
}

// xoshiro256++ (Blackman/Vigna, public domain reference implementation).
// Period 2^256 - 1; plenty for the >= 2^64 contract.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(uint64_t seed = 1) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

} // namespace dbvn
