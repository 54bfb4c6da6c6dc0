#include "coordsim/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "coordsim/channelsim.hpp"
#include "coordsim/decoder.hpp"
#include "coordsim/encoder.hpp"
#include "coordsim/metrics.hpp"

namespace coordsim {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSynthExtraLabel = 2;

CoordinationSpec bsc_spec(double channel_flip) {
    // S ~ Bern(.5), X ~ Bern(.5); U is the noisy parity of X and S (flip
    // probability .25); the reconstruction copies U.
    CondDist aux({2, 2}, 2,
                 {0.75, 0.25,    // (x=0, s=0)
                  0.25, 0.75,    // (x=0, s=1)
                  0.25, 0.75,    // (x=1, s=0)
                  0.75, 0.25});  // (x=1, s=1)
    CondDist recon({2, 2}, 2, {1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0});  // shat = u
    return CoordinationSpec(FiniteDist::bernoulli(0.5), FiniteDist::bernoulli(0.5), std::move(aux),
                            CondDist::bsc(channel_flip), std::move(recon));
}

CoordinationSpec infeasible_spec() {
    // U = S exactly, but the channel is pure noise: the region check fails.
    CondDist aux({2, 2}, 2, {1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0});
    CondDist recon({2, 2}, 2, {1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0});
    return CoordinationSpec(FiniteDist::bernoulli(0.5), FiniteDist::bernoulli(0.5), std::move(aux),
                            CondDist::bsc(0.5), std::move(recon));
}

FiniteDist dist_from_json(const json& j) { return FiniteDist(j.get<std::vector<double>>()); }

CondDist cond_from_json(const json& j, std::vector<int> input_sizes) {
    std::vector<double> table;
    int output_size = -1;
    for (const auto& row : j) {
        auto r = row.get<std::vector<double>>();
        if (output_size < 0) output_size = static_cast<int>(r.size());
        if (static_cast<int>(r.size()) != output_size)
            throw std::invalid_argument("scenario: ragged kernel rows");
        table.insert(table.end(), r.begin(), r.end());
    }
    return CondDist(std::move(input_sizes), output_size, std::move(table));
}

CoordinationSpec spec_from_json(const json& j) {
    FiniteDist source = dist_from_json(j.at("source"));
    FiniteDist input = dist_from_json(j.at("input"));
    const int ss = source.size();
    CondDist aux = cond_from_json(j.at("aux_given_xs"), {2, ss});
    CondDist channel = cond_from_json(j.at("channel"), {2});
    const int ys = channel.output_size();
    CondDist recon = cond_from_json(j.at("recon_given_uy"), {2, ys});
    return CoordinationSpec(std::move(source), std::move(input), std::move(aux), std::move(channel),
                            std::move(recon));
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt(double v, const char* spec = "%.10g") {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"bsc-scenario", "noiseless-scenario", "infeasible-scenario"};
}

Scenario scenario_preset(const std::string& name) {
    std::optional<CoordinationSpec> spec;
    if (name == "bsc-scenario")
        spec = bsc_spec(0.1);
    else if (name == "noiseless-scenario")
        spec = bsc_spec(0.0);
    else if (name == "infeasible-scenario")
        spec = infeasible_spec();
    else
        throw std::invalid_argument("unknown preset \"" + name + "\"");
    Scenario sc{name, std::move(*spec), {64}, 4, std::nullopt, 0.25, {1}, 10000, 0, false, 1,
                0x5eedc0de, false};
    return sc;
}

Scenario scenario_from_json_text(const std::string& text) {
    json j = json::parse(text);
    if (!j.contains("preset") && !j.contains("spec"))
        throw std::invalid_argument("scenario: need either \"preset\" or an inline \"spec\"");
    Scenario sc = j.contains("preset") ? scenario_preset(j.at("preset").get<std::string>())
                                       : Scenario{"custom",
                                                  spec_from_json(j.at("spec")),
                                                  {64},
                                                  4,
                                                  std::nullopt,
                                                  0.25,
                                                  {1},
                                                  10000,
                                                  0,
                                                  false,
                                                  1,
                                                  0x5eedc0de,
                                                  false};
    if (j.contains("name")) sc.name = j.at("name").get<std::string>();
    if (j.contains("n_list")) sc.n_list = j.at("n_list").get<std::vector<int>>();
    if (j.contains("k")) sc.k = j.at("k").get<int>();
    if (j.contains("delta")) sc.delta = j.at("delta").get<double>();
    if (j.contains("beta")) sc.beta = j.at("beta").get<double>();
    if (j.contains("seeds")) sc.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("num_seeds")) {
        const auto count = j.at("num_seeds").get<std::uint64_t>();
        const auto first = j.value("first_seed", std::uint64_t{1});
        sc.seeds.clear();
        for (std::uint64_t s = 0; s < count; ++s) sc.seeds.push_back(first + s);
    }
    if (j.contains("samples")) sc.samples = j.at("samples").get<long>();
    if (j.contains("offset")) sc.source_offset = j.at("offset").get<int>();
    if (j.contains("trace")) sc.trace = j.at("trace").get<bool>();
    if (j.contains("workers")) sc.workers = j.at("workers").get<int>();
    if (j.contains("construction_seed"))
        sc.construction_seed = j.at("construction_seed").get<std::uint64_t>();
    if (j.contains("force")) sc.force = j.at("force").get<bool>();

    if (sc.n_list.empty()) throw std::invalid_argument("scenario: n_list is empty");
    for (int n : sc.n_list)
        if (!is_power_of_two(n)) throw std::invalid_argument("scenario: n must be a power of two");
    if (sc.k < 1) throw std::invalid_argument("scenario: k must be at least 1");
    if (sc.seeds.empty()) throw std::invalid_argument("scenario: need at least one seed");
    if (sc.source_offset != 0 && sc.source_offset != 1)
        throw std::invalid_argument("scenario: offset must be 0 or 1");
    return sc;
}

Scenario scenario_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read scenario file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return scenario_from_json_text(text);
}

double delta_for(const Scenario& scenario, int n) {
    if (scenario.delta) return *scenario.delta;
    const double shaped = std::pow(2.0, -std::pow(static_cast<double>(n), scenario.beta));
    return std::clamp(shaped, 0.05, 0.45);
}

namespace {

struct PerNContext {
    const Scenario& sc;
    const IndexLayout& layout;
    const ChannelCode& code;
    const JointDist& target;       // P_{S X Y Shat}
    const FiniteDist& shat_marginal;
    double delta;
};

RunResult run_one(const PerNContext& ctx, std::uint64_t seed, json* trace_out) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario& sc = ctx.sc;
    const CoordinationSpec& spec = sc.spec;
    const int n = ctx.layout.n;
    const int k = sc.k;

    RandomnessStreams streams(seed);
    std::vector<SymbolBlock> sources;  // S_0 .. S_{k+1}
    sources.reserve(k + 2);
    for (int i = 0; i <= k + 1; ++i)
        sources.push_back(
            sample_source(spec.source, n, streams.stream(StreamKind::Source, 0, i)));

    const CommonRandomness cr = draw_common_randomness(ctx.layout, ctx.code, streams);
    const std::vector<SymbolBlock> enc_sources(sources.begin(), sources.begin() + k + 1);
    const EncoderOutput enc =
        encode_chain(spec, ctx.layout, ctx.code, enc_sources, cr, streams, sc.source_offset);

    std::vector<SymbolBlock> y_blocks;
    y_blocks.reserve(k + 1);
    for (int i = 1; i <= k; ++i)
        y_blocks.push_back(
            transmit(enc.x_blocks[i - 1], spec.channel, streams.stream(StreamKind::Channel, 0, i)));
    y_blocks.push_back(
        transmit(enc.extra_block, spec.channel, streams.stream(StreamKind::Channel, 0, k + 1)));

    const DecoderOutput dec = decode_chain(spec, ctx.layout, ctx.code, y_blocks, cr, streams);

    // The slack block carries no description; emit its reconstruction from the
    // target marginal so the pooled type still has a complete tuple.
    const SymbolBlock shat_extra =
        sample_source(ctx.shat_marginal, n,
                      streams.stream(StreamKind::Decoder, kSynthExtraLabel, k + 1));

    // Pool the empirical type of (S, X, Y, Shat) over all k+1 blocks.
    const std::vector<std::string> roles = {"S", "X", "Y", "Shat"};
    const std::vector<int> dims = {spec.s_size(), 2, spec.y_size(), spec.shat_size()};
    std::vector<SymbolBlock> x_syms;
    x_syms.reserve(k + 1);
    for (int i = 0; i < k; ++i) x_syms.push_back(SymbolBlock::from_bits(enc.x_blocks[i]));
    x_syms.push_back(SymbolBlock::from_bits(enc.extra_block));

    std::vector<std::vector<const SymbolBlock*>> vars(4);
    for (int i = 1; i <= k + 1; ++i) {
        vars[0].push_back(&sources[i]);
        vars[1].push_back(&x_syms[i - 1]);
        vars[2].push_back(&y_blocks[i - 1]);
        vars[3].push_back(i <= k ? &dec.s_hat_blocks[i - 1] : &shat_extra);
    }
    const EmpiricalType pooled = type_of(roles, dims, vars);

    double v_block_sum = 0.0;
    for (int i = 1; i <= k; ++i) {
        std::vector<std::vector<const SymbolBlock*>> one(4);
        one[0] = {&sources[i]};
        one[1] = {&x_syms[i - 1]};
        one[2] = {&y_blocks[i - 1]};
        one[3] = {&dec.s_hat_blocks[i - 1]};
        v_block_sum += variational_distance(type_of(roles, dims, one).distribution(), ctx.target);
    }

    RunResult r;
    r.scenario = sc.name;
    r.n = n;
    r.k = k;
    r.delta = ctx.delta;
    r.seed = seed;
    r.v_total = variational_distance(pooled.distribution(), ctx.target);
    r.v_block_mean = v_block_sum / k;
    r.d_proxy = kl_divergence(pooled.distribution(), ctx.target);
    r.cr_rate = rate_report(ctx.layout, k).cr_rate;
    r.block_err_count = 0;
    for (int i = 0; i < k; ++i)
        if (dec.z_hat_blocks[i].bits != enc.z_blocks[i].bits ||
            dec.v_hat_blocks[i].bits != enc.v_blocks[i].bits)
            ++r.block_err_count;
    r.extra_block_fail = dec.extra_payload != enc.extra_payload;
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();

    if (trace_out) {
        json t;
        t["seed"] = seed;
        t["n"] = n;
        t["k"] = k;
        t["layout_hash"] = hex64(layout_hash(ctx.layout));
        t["blocks"] = json::array();
        for (int i = 1; i <= k; ++i) {
            json b;
            b["s"] = sources[i].symbols;
            b["z"] = enc.z_blocks[i - 1].bits;
            b["x"] = enc.x_blocks[i - 1].bits;
            b["v"] = enc.v_blocks[i - 1].bits;
            b["u"] = polar_transform(enc.v_blocks[i - 1]).bits;
            b["y"] = y_blocks[i - 1].symbols;
            b["z_hat"] = dec.z_hat_blocks[i - 1].bits;
            b["v_hat"] = dec.v_hat_blocks[i - 1].bits;
            b["u_hat"] = polar_transform(dec.v_hat_blocks[i - 1]).bits;
            b["s_hat"] = dec.s_hat_blocks[i - 1].symbols;
            b["sc_flag"] = dec.sc_flags[i - 1] != 0;
            t["blocks"].push_back(std::move(b));
        }
        t["extra"] = {{"s", sources[k + 1].symbols},
                      {"x", enc.extra_block.bits},
                      {"y", y_blocks[k].symbols},
                      {"s_hat", shat_extra.symbols},
                      {"payload", enc.extra_payload},
                      {"decoded_payload", dec.extra_payload},
                      {"sc_flag", dec.extra_sc_flag}};
        *trace_out = std::move(t);
    }
    return r;
}

}  // namespace

ExperimentResult run_experiment(const Scenario& sc, const RunOptions& options) {
    const RegionReport region = check_region(sc.spec);
    if (!region.inside && !sc.force)
        throw std::runtime_error("scenario target is outside the achievable region (needs " +
                                 fmt(region.rate_needed) + " bits, channel offers " +
                                 fmt(region.rate_available) + "); pass force to run anyway");
    if (options.layout_path && sc.n_list.size() != 1)
        throw std::invalid_argument("an explicit layout file requires a single n");

    const std::uint64_t spec_hash = sc.spec.hash();
    const JointDist full = joint(sc.spec);
    const std::vector<std::string> tuple = {"S", "X", "Y", "Shat"};
    const JointDist target = full.marginal(tuple);
    const std::vector<std::string> shat_only = {"Shat"};
    const FiniteDist shat_marginal(full.marginal(shat_only).probs());

    ExperimentResult result;
    result.preamble.push_back("# coordsim experiment");
    result.preamble.push_back("# scenario=" + sc.name + " spec_hash=" + hex64(spec_hash) +
                              " k=" + std::to_string(sc.k) + " offset=" +
                              std::to_string(sc.source_offset) + " samples=" +
                              std::to_string(sc.samples) + " construction_seed=" +
                              std::to_string(sc.construction_seed));

    for (int n : sc.n_list) {
        const double delta = delta_for(sc, n);
        IndexLayout layout;
        if (options.layout_path) {
            LayoutFileMeta meta;
            layout = read_layout_file(*options.layout_path, spec_hash, &meta);
            if (layout.n != n)
                throw std::runtime_error("layout file n=" + std::to_string(layout.n) +
                                         " does not match requested n=" + std::to_string(n));
        } else {
            layout = build_layout(profile_all(sc.spec, n, ProfileMethod::MonteCarlo, sc.samples,
                                              sc.construction_seed, sc.workers),
                                  delta, sc.force);
        }
        if (!layout.feasible && sc.k >= 2)
            throw InfeasibleLayoutError(
                "layout at n=" + std::to_string(n) +
                " cannot chain (|a2| < |a3|+|b3|); only k=1 runs are possible here");

        const int payload = static_cast<int>(layout.a3.size() + layout.b3.size());
        const ChannelCode code =
            make_channel_code(sc.spec, n, payload, sc.samples, sc.construction_seed, sc.workers);

        result.preamble.push_back(
            "# n=" + std::to_string(n) + " delta=" + fmt(layout.delta) + " layout_hash=" +
            hex64(layout_hash(layout)) + " payload=" + std::to_string(payload) + " cr_rate=" +
            fmt(rate_report(layout, sc.k).cr_rate) + " feasible=" +
            (layout.feasible ? "1" : "0"));

        const PerNContext ctx{sc, layout, code, target, shat_marginal, delta};
        const int num_seeds = static_cast<int>(sc.seeds.size());
        std::vector<RunResult> rows(num_seeds);
        std::vector<json> traces(sc.trace ? num_seeds : 0);
        const int workers = sc.workers < 1 ? 1 : sc.workers;

        auto work = [&](int w) {
            for (int idx = w; idx < num_seeds; idx += workers)
                rows[idx] = run_one(ctx, sc.seeds[idx], sc.trace ? &traces[idx] : nullptr);
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& th : pool) th.join();
        }

        for (int idx = 0; idx < num_seeds; ++idx) result.rows.push_back(rows[idx]);
        if (sc.trace && options.trace_prefix) {
            for (int idx = 0; idx < num_seeds; ++idx) {
                const std::string path = *options.trace_prefix + "_n" + std::to_string(n) +
                                         "_seed" + std::to_string(sc.seeds[idx]) + ".json";
                std::ofstream out(path);
                if (!out) throw std::runtime_error("cannot write trace file: " + path);
                out << traces[idx].dump(1) << "\n";
            }
        }
    }
    return result;
}

std::string csv_header(bool include_wall_ms) {
    std::string h =
        "scenario,n,k,delta,seed,V_total,V_per_block(mean),D_proxy,cr_rate,block_err_count,"
        "extra_block_fail";
    if (include_wall_ms) h += ",wall_ms";
    return h;
}

std::string to_csv(const ExperimentResult& result, bool include_wall_ms) {
    std::string out;
    for (const auto& line : result.preamble) {
        out += line;
        out += '\n';
    }
    out += csv_header(include_wall_ms);
    out += '\n';
    for (const auto& r : result.rows) {
        out += r.scenario;
        out += ',' + std::to_string(r.n);
        out += ',' + std::to_string(r.k);
        out += ',' + fmt(r.delta);
        out += ',' + std::to_string(r.seed);
        out += ',' + fmt(r.v_total);
        out += ',' + fmt(r.v_block_mean);
        out += ',' + fmt(r.d_proxy);
        out += ',' + fmt(r.cr_rate);
        out += ',' + std::to_string(r.block_err_count);
        out += ',';
        out += r.extra_block_fail ? '1' : '0';
        if (include_wall_ms) out += ',' + fmt(r.wall_ms, "%.3f");
        out += '\n';
    }
    return out;
}

}  // namespace coordsim
