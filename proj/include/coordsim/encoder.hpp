#pragma once

// Node 1: the block-Markov chained randomized-rounding encoder.  Each of the k
// blocks carries a signal block Z (transformed to the channel input X) and an
// auxiliary block V; the bits that Node 2 cannot infer from its observations
// (sets a3 and b3) ride one block later inside reliably-decodable positions of
// a2, one-time-padded, and the final leftovers go out in an extra
// channel-coded block.

#include <cstdint>
#include <span>
#include <vector>

#include "coordsim/channelsim.hpp"
#include "coordsim/construction.hpp"
#include "coordsim/polar.hpp"
#include "coordsim/probmodel.hpp"

namespace coordsim {

// Shared randomness: frozen fills C1/C2, one-time-pad keys K1/K2, and the
// frozen-position fill of the extra block's channel code.
struct CommonRandomness {
    std::vector<Bit> c1;         // |a1|
    std::vector<Bit> k1;         // |a3|
    std::vector<Bit> c2;         // |b1|
    std::vector<Bit> k2;         // |b3|
    std::vector<Bit> cc_frozen;  // channel-code frozen positions, n - payload
};

// Polar channel code for P_{Y|X} under uniform input: the payload rides the
// positions whose posterior conditional entropy is lowest; everything else is
// frozen to shared random bits.
struct ChannelCode {
    int n = 0;
    std::vector<int> info_set;    // sorted positions carrying payload bits
    std::vector<int> frozen_set;  // sorted complement
    int payload_length() const { return static_cast<int>(info_set.size()); }
};

// Build the code by profiling H(Z_j | Z-prefix, Y-block) under uniform channel
// input.  Throws when the payload rate exceeds the uniform-input mutual
// information of the channel.
ChannelCode make_channel_code(const CoordinationSpec& spec, int n, int payload_len, long samples,
                              std::uint64_t seed, int workers = 1);

// The posterior bit model the code's SC decoder runs on (uniform input prior).
ProfileModel channel_code_model(const CoordinationSpec& spec);

CommonRandomness draw_common_randomness(const IndexLayout& layout, const ChannelCode& code,
                                        const RandomnessStreams& streams);

std::vector<Bit> one_time_pad(std::span<const Bit> bits, std::span<const Bit> key);

BitBlock encode_extra_block(std::span<const Bit> payload, const ChannelCode& code,
                            std::span<const Bit> frozen_bits);

// SC decode of the extra block; returns the payload bits.  `sc_flag` is set
// when the decoder hit an impossible conditional and substituted a guess.
std::vector<Bit> decode_extra_block(const SymbolBlock& y, const ChannelCode& code,
                                    const CoordinationSpec& spec, std::span<const Bit> frozen_bits,
                                    bool* sc_flag = nullptr);

struct EncoderOutput {
    std::vector<BitBlock> z_blocks;  // k signal blocks, pre-transform domain
    std::vector<BitBlock> v_blocks;  // k auxiliary blocks
    std::vector<BitBlock> x_blocks;  // x = transform(z), the channel inputs
    BitBlock extra_block;            // block k+1 channel input
    std::vector<Bit> extra_payload;  // the (a3, b3) bits the extra block carries
};

// Run the full chain.  `sources` holds S_0..S_k; S_0 is consumed only when
// source_offset = 1 (auxiliary blocks conditioned on the previous source
// block) and ignored at the default offset 0 (same-block conditioning).
EncoderOutput encode_chain(const CoordinationSpec& spec, const IndexLayout& layout,
                           const ChannelCode& code, const std::vector<SymbolBlock>& sources,
                           const CommonRandomness& cr, const RandomnessStreams& streams,
                           int source_offset = 0);

}  // namespace coordsim
