#pragma once

// Node 2: reverse-order block decoding and reconstruction synthesis.  The
// extra block is decoded first, giving block k's undeliverable bits; each
// earlier block's come out of the following block's chained positions.

#include <cstdint>
#include <vector>

#include "coordsim/channelsim.hpp"
#include "coordsim/construction.hpp"
#include "coordsim/encoder.hpp"
#include "coordsim/polar.hpp"
#include "coordsim/probmodel.hpp"

namespace coordsim {

struct DecoderOutput {
    std::vector<BitBlock> z_hat_blocks;      // k estimated signal blocks
    std::vector<BitBlock> v_hat_blocks;      // k estimated auxiliary blocks
    std::vector<SymbolBlock> s_hat_blocks;   // k synthesized reconstructions
    std::vector<std::uint8_t> sc_flags;      // per block: impossible conditional seen
    bool extra_sc_flag = false;              // same, extra-block decode
    std::vector<Bit> extra_payload;          // decoded (a3, b3) payload
};

// Decode all blocks from the k+1 channel outputs.  Hard decisions follow the
// likelihood-ratio rule (0 when the ratio is at least 1); impossible
// conditionals are flagged and decoding continues best-effort.
DecoderOutput decode_chain(const CoordinationSpec& spec, const IndexLayout& layout,
                           const ChannelCode& code, const std::vector<SymbolBlock>& y_blocks,
                           const CommonRandomness& cr, const RandomnessStreams& streams);

// Draw each reconstruction symbol from cond's row (u_t, y_t).
SymbolBlock synthesize_s_hat(const BitBlock& u_hat, const SymbolBlock& y, const CondDist& cond,
                             Substream stream);

}  // namespace coordsim
