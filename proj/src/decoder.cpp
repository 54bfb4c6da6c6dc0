#include "coordsim/decoder.hpp"

#include <stdexcept>

namespace coordsim {

namespace {

constexpr std::uint64_t kLabelSynth = 1;

enum class Role : std::uint8_t { Decide, Frozen, Known };

struct Plan {
    std::vector<Role> role;
    std::vector<int> rank;
};

Plan make_plan(int n, const IndexSet& frozen, const IndexSet& known) {
    Plan plan;
    plan.role.assign(n, Role::Decide);
    plan.rank.assign(n, -1);
    int r = 0;
    for (int j : frozen) {
        plan.role[j] = Role::Frozen;
        plan.rank[j] = r++;
    }
    r = 0;
    for (int j : known) {
        plan.role[j] = Role::Known;
        plan.rank[j] = r++;
    }
    return plan;
}

BitBlock run_sc_decode(ScProcess& proc, const Plan& plan, const std::vector<Bit>& frozen,
                       const std::vector<Bit>& known, int n) {
    for (int j = 0; j < n; ++j) {
        Bit b;
        switch (plan.role[j]) {
            case Role::Frozen: b = frozen[plan.rank[j]]; break;
            case Role::Known: b = known[plan.rank[j]]; break;
            default: b = proc.llr() >= 1.0 ? 0 : 1; break;
        }
        proc.commit(b);
    }
    return BitBlock(proc.committed());
}

}  // namespace

SymbolBlock synthesize_s_hat(const BitBlock& u_hat, const SymbolBlock& y, const CondDist& cond,
                             Substream stream) {
    if (u_hat.n() != y.n()) throw std::invalid_argument("synthesize_s_hat: length mismatch");
    std::vector<int> s(u_hat.n());
    for (int t = 0; t < u_hat.n(); ++t) {
        const int row = cond.row_index(std::array<int, 2>{u_hat[t], y[t]});
        const double u = stream.u01_at(t);
        double acc = 0.0;
        int pick = cond.output_size() - 1;
        for (int v = 0; v < cond.output_size() - 1; ++v) {
            acc += cond.row_at(row)[v];
            if (u < acc) {
                pick = v;
                break;
            }
        }
        s[t] = pick;
    }
    return SymbolBlock(std::move(s), cond.output_size());
}

DecoderOutput decode_chain(const CoordinationSpec& spec, const IndexLayout& layout,
                           const ChannelCode& code, const std::vector<SymbolBlock>& y_blocks,
                           const CommonRandomness& cr, const RandomnessStreams& streams) {
    const int n = layout.n;
    const int k = static_cast<int>(y_blocks.size()) - 1;
    if (k < 1) throw std::invalid_argument("decode_chain: need k+1 channel outputs with k >= 1");
    for (const auto& y : y_blocks)
        if (y.n() != n) throw std::invalid_argument("decode_chain: output block length mismatch");
    if (k >= 2 && !layout.feasible)
        throw InfeasibleLayoutError("decode_chain: chaining requires |a2| >= |a3| + |b3|");

    const auto pm_z = make_profile_model(spec, ProfileTarget::ZGivenY);
    const auto pm_v = make_profile_model(spec, ProfileTarget::VGivenX);
    const Plan plan_z = make_plan(n, layout.a1, layout.a3);
    const Plan plan_v = make_plan(n, layout.b1, layout.b3);

    DecoderOutput out;
    out.z_hat_blocks.assign(k, BitBlock());
    out.v_hat_blocks.assign(k, BitBlock());
    out.s_hat_blocks.assign(k, SymbolBlock());
    out.sc_flags.assign(k, 0);

    // The extra block first: it carries block k's chained bits.
    out.extra_payload = decode_extra_block(y_blocks[k], code, spec, cr.cc_frozen, &out.extra_sc_flag);

    ScProcess proc;
    std::vector<Bit> known_a3(layout.a3.size()), known_b3(layout.b3.size());
    for (int i = k; i >= 1; --i) {
        if (i == k) {
            std::copy_n(out.extra_payload.begin(), layout.a3.size(), known_a3.begin());
            std::copy_n(out.extra_payload.begin() + layout.a3.size(), layout.b3.size(),
                        known_b3.begin());
        } else {
            // Unpad from the already-decoded next block's chaining positions.
            const BitBlock& z_next = out.z_hat_blocks[i];  // block i+1, 0-based slot i
            for (size_t r = 0; r < layout.a3.size(); ++r)
                known_a3[r] = z_next[layout.a3_prime[r]] ^ cr.k1[r];
            for (size_t r = 0; r < layout.b3.size(); ++r)
                known_b3[r] = z_next[layout.b3_prime[r]] ^ cr.k2[r];
        }

        const SymbolBlock& y = y_blocks[i - 1];
        proc.reset(pm_z.model, y, ScProcess::ZeroPolicy::FlagUniform);
        BitBlock z_hat = run_sc_decode(proc, plan_z, cr.c1, known_a3, n);
        bool flagged = proc.flagged();

        const BitBlock x_hat = polar_transform(z_hat);
        proc.reset(pm_v.model, SymbolBlock::from_bits(x_hat), ScProcess::ZeroPolicy::FlagUniform);
        BitBlock v_hat = run_sc_decode(proc, plan_v, cr.c2, known_b3, n);
        flagged = flagged || proc.flagged();

        const BitBlock u_hat = polar_transform(v_hat);
        Substream synth =
            streams.stream(StreamKind::Decoder, kLabelSynth, static_cast<std::uint64_t>(i));
        out.s_hat_blocks[i - 1] = synthesize_s_hat(u_hat, y, spec.recon_given_uy, synth);
        out.z_hat_blocks[i - 1] = std::move(z_hat);
        out.v_hat_blocks[i - 1] = std::move(v_hat);
        out.sc_flags[i - 1] = flagged ? 1 : 0;
    }
    return out;
}

}  // namespace coordsim
