#pragma once

// Deterministic randomness streams plus i.i.d. source sampling and memoryless
// channel transmission.  All randomness is counter-based: every draw is a pure
// function of (master seed, stream kind, label, block, counter), so results
// are bit-identical regardless of scheduling or worker count.

#include <cstdint>

#include "coordsim/polar.hpp"
#include "coordsim/probmodel.hpp"

namespace coordsim {

// Top-level purposes; each gets an independent stream family.
enum class StreamKind : std::uint64_t {
    Source = 1,   // S-block draws
    LocalM = 2,   // encoder-local randomness (fresh bits, randomized rounding)
    CommonC = 3,  // shared randomness (C1, K1, C2, K2, channel-code fill)
    Channel = 4,  // DMC noise
    Decoder = 5,  // decoder-local randomness (reconstruction synthesis)
};

// Addressable generator: `at`-style calls are pure; the draw()/draw_bit()
// conveniences advance an internal counter for sequential use.
class Substream {
public:
    Substream() = default;
    explicit Substream(std::uint64_t key) : key_(key) {}

    std::uint64_t word_at(std::uint64_t counter) const;
    double u01_at(std::uint64_t counter) const;  // uniform in [0,1)
    Bit bit_at(std::uint64_t counter) const;
    int symbol_at(const FiniteDist& p, std::uint64_t counter) const;  // inverse CDF

    double draw() { return u01_at(next_++); }
    Bit draw_bit() { return bit_at(next_++); }
    int draw_symbol(const FiniteDist& p) { return symbol_at(p, next_++); }

private:
    std::uint64_t key_ = 0;
    std::uint64_t next_ = 0;
};

class RandomnessStreams {
public:
    explicit RandomnessStreams(std::uint64_t master_seed) : master_(master_seed) {}

    std::uint64_t master_seed() const { return master_; }
    Substream stream(StreamKind kind, std::uint64_t label = 0, std::uint64_t block = 0) const;

private:
    std::uint64_t master_;
};

// i.i.d. draws S^t ~ p_s, one counter per position.
SymbolBlock sample_source(const FiniteDist& p_s, int n, Substream stream);

// Memoryless transmission: Y^t ~ P(.|x^t), one counter per position.
SymbolBlock transmit(const BitBlock& x, const CondDist& p_y_given_x, Substream stream);

}  // namespace coordsim
