#include "coordsim/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coordsim {

namespace {

// Stream labels inside StreamKind::CommonC and StreamKind::LocalM.
constexpr std::uint64_t kLabelC1 = 1, kLabelK1 = 2, kLabelC2 = 3, kLabelK2 = 4, kLabelCc = 5;
constexpr std::uint64_t kLabelZ = 1, kLabelV = 2;

std::vector<Bit> draw_bits(Substream s, size_t count) {
    std::vector<Bit> out(count);
    for (size_t i = 0; i < count; ++i) out[i] = s.bit_at(i);
    return out;
}

// Per-position role table for one block's SC pass.
enum class Role : std::uint8_t { Sample, Frozen, Pad };  // Pad == value supplied by caller

struct PositionPlan {
    std::vector<Role> role;
    std::vector<int> rank;  // index into the frozen/pad source vector
};

PositionPlan plan_positions(int n, const std::vector<std::pair<const IndexSet*, Role>>& assignments) {
    PositionPlan plan;
    plan.role.assign(n, Role::Sample);
    plan.rank.assign(n, -1);
    for (const auto& [set, role] : assignments) {
        int r = 0;
        for (int j : *set) {
            plan.role[j] = role;
            plan.rank[j] = r++;
        }
    }
    return plan;
}

}  // namespace

ProfileModel channel_code_model(const CoordinationSpec& spec) {
    // Posterior P(x | y) under a uniform channel input, side marginal P_Y.
    const int ys = spec.y_size();
    std::vector<double> py(ys, 0.0);
    for (int x = 0; x < 2; ++x) {
        auto row = spec.channel.row_at(x);
        for (int y = 0; y < ys; ++y) py[y] += 0.5 * row[y];
    }
    std::vector<double> post(static_cast<size_t>(ys) * 2);
    for (int y = 0; y < ys; ++y)
        for (int x = 0; x < 2; ++x)
            post[static_cast<size_t>(y) * 2 + x] =
                py[y] > 0.0 ? 0.5 * spec.channel.row_at(x)[y] / py[y] : 0.5;
    return {ScModel(CondDist({ys}, 2, std::move(post))), FiniteDist(std::move(py))};
}

ChannelCode make_channel_code(const CoordinationSpec& spec, int n, int payload_len, long samples,
                              std::uint64_t seed, int workers) {
    if (!is_power_of_two(n)) throw std::invalid_argument("make_channel_code: n must be a power of two");
    if (payload_len < 0 || payload_len > n)
        throw std::invalid_argument("make_channel_code: bad payload length");

    // Uniform-input mutual information caps the supported rate.
    const auto pm = channel_code_model(spec);
    double h_y = 0.0, h_y_given_x = 0.0;
    for (int y = 0; y < spec.y_size(); ++y) {
        const double p = pm.side_marginal.prob(y);
        if (p > 0.0) h_y -= p * std::log2(p);
    }
    for (int x = 0; x < 2; ++x) {
        auto row = spec.channel.row_at(x);
        for (double p : row)
            if (p > 0.0) h_y_given_x -= 0.5 * p * std::log2(p);
    }
    const double capacity = h_y - h_y_given_x;
    if (payload_len > capacity * n)
        throw std::invalid_argument("make_channel_code: payload rate " +
                                    std::to_string(static_cast<double>(payload_len) / n) +
                                    " exceeds the channel's uniform-input rate " +
                                    std::to_string(capacity));

    const auto profile = monte_carlo_profile(pm, n, samples, seed, /*stream_label=*/5, workers);

    // Most reliable positions first; ties broken by position for determinism.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return profile.h[a] < profile.h[b]; });

    ChannelCode code;
    code.n = n;
    code.info_set.assign(order.begin(), order.begin() + payload_len);
    std::sort(code.info_set.begin(), code.info_set.end());
    code.frozen_set.assign(order.begin() + payload_len, order.end());
    std::sort(code.frozen_set.begin(), code.frozen_set.end());
    return code;
}

CommonRandomness draw_common_randomness(const IndexLayout& layout, const ChannelCode& code,
                                        const RandomnessStreams& streams) {
    CommonRandomness cr;
    cr.c1 = draw_bits(streams.stream(StreamKind::CommonC, kLabelC1), layout.a1.size());
    cr.k1 = draw_bits(streams.stream(StreamKind::CommonC, kLabelK1), layout.a3.size());
    cr.c2 = draw_bits(streams.stream(StreamKind::CommonC, kLabelC2), layout.b1.size());
    cr.k2 = draw_bits(streams.stream(StreamKind::CommonC, kLabelK2), layout.b3.size());
    cr.cc_frozen = draw_bits(streams.stream(StreamKind::CommonC, kLabelCc), code.frozen_set.size());
    return cr;
}

std::vector<Bit> one_time_pad(std::span<const Bit> bits, std::span<const Bit> key) {
    if (bits.size() != key.size()) throw std::invalid_argument("one_time_pad: length mismatch");
    std::vector<Bit> out(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ^ key[i];
    return out;
}

BitBlock encode_extra_block(std::span<const Bit> payload, const ChannelCode& code,
                            std::span<const Bit> frozen_bits) {
    if (static_cast<int>(payload.size()) != code.payload_length())
        throw std::invalid_argument("encode_extra_block: payload length mismatch");
    if (frozen_bits.size() != code.frozen_set.size())
        throw std::invalid_argument("encode_extra_block: frozen fill length mismatch");
    BitBlock z(code.n);
    for (size_t r = 0; r < code.info_set.size(); ++r) z[code.info_set[r]] = payload[r];
    for (size_t r = 0; r < code.frozen_set.size(); ++r) z[code.frozen_set[r]] = frozen_bits[r];
    return polar_transform(z);
}

std::vector<Bit> decode_extra_block(const SymbolBlock& y, const ChannelCode& code,
                                    const CoordinationSpec& spec, std::span<const Bit> frozen_bits,
                                    bool* sc_flag) {
    if (y.n() != code.n) throw std::invalid_argument("decode_extra_block: block length mismatch");
    if (frozen_bits.size() != code.frozen_set.size())
        throw std::invalid_argument("decode_extra_block: frozen fill length mismatch");

    const auto pm = channel_code_model(spec);
    ScProcess proc(pm.model, y, ScProcess::ZeroPolicy::FlagUniform);
    std::vector<int> frozen_rank(code.n, -1);
    for (size_t r = 0; r < code.frozen_set.size(); ++r) frozen_rank[code.frozen_set[r]] = static_cast<int>(r);

    std::vector<Bit> payload;
    payload.reserve(code.info_set.size());
    for (int j = 0; j < code.n; ++j) {
        if (frozen_rank[j] >= 0) {
            proc.commit(frozen_bits[frozen_rank[j]]);
        } else {
            const Bit b = proc.llr() >= 1.0 ? 0 : 1;
            proc.commit(b);
            payload.push_back(b);
        }
    }
    if (sc_flag) *sc_flag = proc.flagged();
    return payload;
}

EncoderOutput encode_chain(const CoordinationSpec& spec, const IndexLayout& layout,
                           const ChannelCode& code, const std::vector<SymbolBlock>& sources,
                           const CommonRandomness& cr, const RandomnessStreams& streams,
                           int source_offset) {
    const int n = layout.n;
    const int k = static_cast<int>(sources.size()) - 1;
    if (k < 1) throw std::invalid_argument("encode_chain: need source blocks S_0..S_k with k >= 1");
    if (source_offset != 0 && source_offset != 1)
        throw std::invalid_argument("encode_chain: source offset must be 0 or 1");
    if (k >= 2 && !layout.feasible)
        throw InfeasibleLayoutError("encode_chain: chaining requires |a2| >= |a3| + |b3|");
    for (const auto& s : sources)
        if (s.n() != n) throw std::invalid_argument("encode_chain: source block length mismatch");
    if (cr.c1.size() != layout.a1.size() || cr.k1.size() != layout.a3.size() ||
        cr.c2.size() != layout.b1.size() || cr.k2.size() != layout.b3.size())
        throw std::invalid_argument("encode_chain: common randomness does not match the layout");
    if (code.n != n || code.payload_length() != static_cast<int>(layout.a3.size() + layout.b3.size()))
        throw std::invalid_argument("encode_chain: channel code does not match the layout");

    const auto pm_z = make_profile_model(spec, ProfileTarget::ZMarginal);
    const auto pm_v = make_profile_model(spec, ProfileTarget::VGivenXS);

    // Block-1 plan: a1 frozen, everything else in v_x fresh-uniform, the rest
    // sampled.  Later blocks re-purpose a3_prime/b3_prime for chained bits.
    const PositionPlan plan_z_first = plan_positions(
        n, {{&layout.a1, Role::Frozen}, {&layout.a2, Role::Pad}});
    const PositionPlan plan_z_chain = plan_positions(
        n, {{&layout.a1, Role::Frozen}, {&layout.a2_prime, Role::Pad},
            {&layout.a3_prime, Role::Pad}, {&layout.b3_prime, Role::Pad}});
    const PositionPlan plan_v = plan_positions(n, {{&layout.b1, Role::Frozen}});

    EncoderOutput out;
    out.z_blocks.reserve(k);
    out.v_blocks.reserve(k);
    out.x_blocks.reserve(k);

    ScProcess proc;
    std::vector<Bit> pad_values(n, 0);

    for (int i = 1; i <= k; ++i) {
        // Assemble the caller-supplied values for this block's pad positions:
        // fresh uniform bits for a2 (or a2_prime), chained one-time-padded bits
        // for a3_prime/b3_prime on blocks after the first.
        Substream mz = streams.stream(StreamKind::LocalM, kLabelZ, static_cast<std::uint64_t>(i));
        const bool first = i == 1;
        const PositionPlan& plan = first ? plan_z_first : plan_z_chain;
        if (first) {
            for (int j : layout.a2) pad_values[j] = mz.bit_at(j);
        } else {
            for (int j : layout.a2_prime) pad_values[j] = mz.bit_at(j);
            const auto& z_prev = out.z_blocks.back();
            const auto& v_prev = out.v_blocks.back();
            for (size_t r = 0; r < layout.a3.size(); ++r)
                pad_values[layout.a3_prime[r]] = z_prev[layout.a3[r]] ^ cr.k1[r];
            for (size_t r = 0; r < layout.b3.size(); ++r)
                pad_values[layout.b3_prime[r]] = v_prev[layout.b3[r]] ^ cr.k2[r];
        }

        proc.reset(pm_z.model, SymbolBlock::constant(n, 0, 1));
        for (int j = 0; j < n; ++j) {
            Bit b;
            switch (plan.role[j]) {
                case Role::Frozen: b = cr.c1[plan.rank[j]]; break;
                case Role::Pad: b = pad_values[j]; break;
                default: b = mz.u01_at(j) < proc.prob0() ? 0 : 1; break;
            }
            proc.commit(b);
        }
        out.z_blocks.emplace_back(proc.committed());
        out.x_blocks.push_back(polar_transform(out.z_blocks.back()));

        // Auxiliary block, conditioned on this block's signal and the paired
        // source block (previous block's source when source_offset = 1).
        const SymbolBlock& s_block = sources[static_cast<size_t>(i - source_offset)];
        const SymbolBlock side =
            zip_symbols(SymbolBlock::from_bits(out.x_blocks.back()), s_block);
        Substream mv = streams.stream(StreamKind::LocalM, kLabelV, static_cast<std::uint64_t>(i));
        proc.reset(pm_v.model, side);
        for (int j = 0; j < n; ++j) {
            Bit b;
            if (plan_v.role[j] == Role::Frozen)
                b = cr.c2[plan_v.rank[j]];
            else
                b = mv.u01_at(j) < proc.prob0() ? 0 : 1;
            proc.commit(b);
        }
        out.v_blocks.emplace_back(proc.committed());
    }

    // Extra block: the last block's undeliverable bits, channel-coded.
    out.extra_payload.reserve(layout.a3.size() + layout.b3.size());
    for (int j : layout.a3) out.extra_payload.push_back(out.z_blocks.back()[j]);
    for (int j : layout.b3) out.extra_payload.push_back(out.v_blocks.back()[j]);
    out.extra_block = encode_extra_block(out.extra_payload, code, cr.cc_frozen);
    return out;
}

}  // namespace coordsim
