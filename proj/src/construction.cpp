#include "coordsim/construction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "coordsim/channelsim.hpp"
#include "coordsim/validation.hpp"

namespace coordsim {

const char* profile_target_name(ProfileTarget t) {
    switch (t) {
        case ProfileTarget::ZMarginal: return "z_marginal";
        case ProfileTarget::ZGivenY: return "z_given_y";
        case ProfileTarget::VGivenXS: return "v_given_xs";
        case ProfileTarget::VGivenX: return "v_given_x";
    }
    throw std::invalid_argument("unknown profile target");
}

ProfileModel make_profile_model(const CoordinationSpec& spec, ProfileTarget target) {
    switch (target) {
        case ProfileTarget::ZMarginal:
            return {ScModel::unconditional(spec.input), FiniteDist({1.0})};
        case ProfileTarget::ZGivenY: {
            // Posterior P(x | y) with side marginal P_Y.  Outputs y outside the
            // support get a uniform placeholder row; they are never drawn.
            const int ys = spec.y_size();
            std::vector<double> py(ys, 0.0);
            for (int x = 0; x < 2; ++x) {
                auto row = spec.channel.row_at(x);
                for (int y = 0; y < ys; ++y) py[y] += spec.input.prob(x) * row[y];
            }
            std::vector<double> post(static_cast<size_t>(ys) * 2);
            for (int y = 0; y < ys; ++y)
                for (int x = 0; x < 2; ++x)
                    post[static_cast<size_t>(y) * 2 + x] =
                        py[y] > 0.0 ? spec.input.prob(x) * spec.channel.row_at(x)[y] / py[y] : 0.5;
            return {ScModel(CondDist({ys}, 2, std::move(post))), FiniteDist(std::move(py))};
        }
        case ProfileTarget::VGivenXS: {
            // Side symbol is the pair (x, s), ranked x-major exactly as the
            // kernel's row index, so the kernel table doubles as the model.
            const int ss = spec.s_size();
            std::vector<double> table;
            table.reserve(static_cast<size_t>(2 * ss) * 2);
            for (int r = 0; r < spec.aux_given_xs.num_rows(); ++r) {
                auto row = spec.aux_given_xs.row_at(r);
                table.insert(table.end(), row.begin(), row.end());
            }
            std::vector<double> marg(static_cast<size_t>(2) * ss);
            for (int x = 0; x < 2; ++x)
                for (int s = 0; s < ss; ++s)
                    marg[static_cast<size_t>(x) * ss + s] = spec.input.prob(x) * spec.source.prob(s);
            return {ScModel(CondDist({2 * ss}, 2, std::move(table))), FiniteDist(std::move(marg))};
        }
        case ProfileTarget::VGivenX:
            return {ScModel(spec.aux_given_x()), spec.input};
    }
    throw std::invalid_argument("unknown profile target");
}

namespace {

constexpr long kChunk = 128;         // samples per reduction chunk (fixed for determinism)
constexpr double kProbFloor = 1e-12; // clamp before taking logs

struct ChunkAccum {
    std::vector<double> sum, sumsq;
};

void run_profile_chunk(const ProfileModel& pm, int n, long first, long count,
                       const RandomnessStreams& rng, std::uint64_t label, ScProcess& proc,
                       std::vector<Bit>& x, std::vector<int>& w, ChunkAccum& acc) {
    const int side_size = pm.side_marginal.size();
    for (long s = first; s < first + count; ++s) {
        Substream draw = rng.stream(StreamKind::Source, label, static_cast<std::uint64_t>(s));
        for (int t = 0; t < n; ++t) {
            w[t] = draw.symbol_at(pm.side_marginal, t);
            const auto law = pm.model.law(w[t]);
            x[t] = draw.u01_at(static_cast<std::uint64_t>(n) + t) < law[1] ? 1 : 0;
        }
        polar_transform_inplace(x);  // x now holds the transformed block z
        proc.reset(pm.model, SymbolBlock(w, side_size));
        for (int j = 0; j < n; ++j) {
            auto law = proc.law();
            double p = law[x[j]];
            if (p < kProbFloor) p = kProbFloor;
            const double v = -std::log2(p);
            acc.sum[j] += v;
            acc.sumsq[j] += v * v;
            proc.commit(x[j]);
        }
    }
}

}  // namespace

EntropyProfile monte_carlo_profile(const ProfileModel& pm, int n, long samples,
                                   std::uint64_t seed, std::uint64_t stream_label, int workers) {
    if (!is_power_of_two(n)) throw std::invalid_argument("monte_carlo_profile: n must be a power of two");
    if (samples < 1) throw std::invalid_argument("monte_carlo_profile: need at least one sample");
    if (workers < 1) workers = 1;

    const long num_chunks = (samples + kChunk - 1) / kChunk;
    std::vector<ChunkAccum> partial(num_chunks);
    RandomnessStreams rng(seed);

    auto work = [&](int worker) {
        ScProcess proc;
        std::vector<Bit> x(n);
        std::vector<int> w(n);
        for (long c = worker; c < num_chunks; c += workers) {
            partial[c].sum.assign(n, 0.0);
            partial[c].sumsq.assign(n, 0.0);
            const long first = c * kChunk;
            const long count = std::min(kChunk, samples - first);
            run_profile_chunk(pm, n, first, count, rng, stream_label, proc, x, w, partial[c]);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }

    // Fixed chunk-order reduction: results are independent of worker count.
    std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
    for (long c = 0; c < num_chunks; ++c)
        for (int j = 0; j < n; ++j) {
            sum[j] += partial[c].sum[j];
            sumsq[j] += partial[c].sumsq[j];
        }

    EntropyProfile prof;
    prof.n = n;
    prof.method = ProfileMethod::MonteCarlo;
    prof.sample_count = samples;
    prof.h.resize(n);
    prof.std_err.resize(n);
    for (int j = 0; j < n; ++j) {
        const double mean = sum[j] / samples;
        double var = 0.0;
        if (samples > 1) {
            var = (sumsq[j] - samples * mean * mean) / (samples - 1);
            if (var < 0.0) var = 0.0;
        }
        prof.h[j] = std::clamp(mean, 0.0, 1.0);  // estimates live in the entropy range
        prof.std_err[j] = std::sqrt(var / samples);
    }
    return prof;
}

EntropyProfile profile_entropies(const CoordinationSpec& spec, int n, ProfileTarget target,
                                 ProfileMethod method, long samples, std::uint64_t seed,
                                 int workers) {
    if (method == ProfileMethod::Exact) return exact_entropy_profile(spec, n, target);
    const ProfileModel pm = make_profile_model(spec, target);
    return monte_carlo_profile(pm, n, samples, seed, static_cast<std::uint64_t>(target) + 1, workers);
}

FourProfiles profile_all(const CoordinationSpec& spec, int n, ProfileMethod method, long samples,
                         std::uint64_t seed, int workers) {
    return FourProfiles{
        profile_entropies(spec, n, ProfileTarget::ZMarginal, method, samples, seed, workers),
        profile_entropies(spec, n, ProfileTarget::ZGivenY, method, samples, seed, workers),
        profile_entropies(spec, n, ProfileTarget::VGivenXS, method, samples, seed, workers),
        profile_entropies(spec, n, ProfileTarget::VGivenX, method, samples, seed, workers),
    };
}

namespace {

IndexSet threshold_set(const std::vector<double>& h, double cut) {
    IndexSet s;
    for (int j = 0; j < static_cast<int>(h.size()); ++j)
        if (h[j] > cut) s.push_back(j);
    return s;
}

IndexSet set_minus(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet set_and(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet complement_of(const IndexSet& a, int n) {
    IndexSet full(n);
    for (int j = 0; j < n; ++j) full[j] = j;
    return set_minus(full, a);
}

}  // namespace

IndexLayout build_layout(const FourProfiles& profiles, double delta, bool allow_infeasible) {
    const int n = profiles.z_marginal.n;
    if (profiles.z_given_y.n != n || profiles.v_given_xs.n != n || profiles.v_given_x.n != n)
        throw std::invalid_argument("build_layout: profiles disagree on n");
    if (!(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("build_layout: delta must lie in (0, 1/2)");

    IndexLayout l;
    l.n = n;
    l.delta = delta;
    l.v_x = threshold_set(profiles.z_marginal.h, 1.0 - delta);
    l.h_x = threshold_set(profiles.z_marginal.h, delta);
    l.h_x_given_y = threshold_set(profiles.z_given_y.h, delta);
    l.v_u_given_xs = threshold_set(profiles.v_given_xs.h, 1.0 - delta);
    l.h_u_given_xs = threshold_set(profiles.v_given_xs.h, delta);
    l.h_u_given_x = threshold_set(profiles.v_given_x.h, delta);

    l.a1 = set_and(l.v_x, l.h_x_given_y);
    l.a2 = set_minus(l.v_x, l.h_x_given_y);
    l.a3 = set_minus(l.h_x_given_y, l.v_x);
    l.a4 = set_minus(complement_of(l.v_x, n), l.h_x_given_y);

    l.b1 = l.v_u_given_xs;
    l.b2 = set_minus(l.v_u_given_xs, l.h_u_given_x);
    l.b3 = set_minus(l.h_u_given_x, l.v_u_given_xs);
    l.b4 = complement_of(l.h_u_given_x, n);
    if (!l.b2.empty())
        throw std::logic_error(
            "build_layout: nearly-uniform-given-(X,S) positions fell outside the high-entropy-"
            "given-X set; conditioning cannot raise entropy, so the profiles are inconsistent");

    const int need = static_cast<int>(l.a3.size() + l.b3.size());
    l.feasible = static_cast<int>(l.a2.size()) >= need;
    if (!l.feasible && !allow_infeasible)
        throw InfeasibleLayoutError(
            "chaining infeasible: |a2|=" + std::to_string(l.a2.size()) + " < |a3|+|b3|=" +
            std::to_string(need) + " at n=" + std::to_string(n) + ", delta=" + std::to_string(delta));
    if (l.feasible) {
        // Deterministic allocation: lowest a2 indices first.
        l.a3_prime.assign(l.a2.begin(), l.a2.begin() + l.a3.size());
        l.b3_prime.assign(l.a2.begin() + l.a3.size(), l.a2.begin() + need);
        l.a2_prime.assign(l.a2.begin() + need, l.a2.end());
    }
    return l;
}

RateReport rate_report(const IndexLayout& l, int k) {
    if (k < 1) throw std::invalid_argument("rate_report: k must be at least 1");
    const double n = l.n;
    RateReport r{};
    r.cr_rate = static_cast<double>(l.a1.size() + l.a3.size() + l.b1.size() + l.b3.size()) / (k * n);
    r.slack = static_cast<int>(l.a2.size()) - static_cast<int>(l.a3.size()) -
              static_cast<int>(l.b3.size());
    r.frac_v_x = l.v_x.size() / n;
    r.frac_h_x_given_y = l.h_x_given_y.size() / n;
    r.frac_a1 = l.a1.size() / n;
    r.frac_a2 = l.a2.size() / n;
    r.frac_a3 = l.a3.size() / n;
    r.frac_a4 = l.a4.size() / n;
    r.frac_b1 = l.b1.size() / n;
    r.frac_b3 = l.b3.size() / n;
    r.frac_b4 = l.b4.size() / n;
    return r;
}

namespace {

using nlohmann::json;

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t parse_hash_hex(const std::string& s) {
    return std::stoull(s, nullptr, 16);
}

void put_sets(json& j, const IndexLayout& l) {
    j["sets"] = {
        {"v_x", l.v_x},           {"h_x", l.h_x},
        {"h_x_given_y", l.h_x_given_y}, {"v_u_given_xs", l.v_u_given_xs},
        {"h_u_given_xs", l.h_u_given_xs}, {"h_u_given_x", l.h_u_given_x},
        {"a1", l.a1}, {"a2", l.a2}, {"a3", l.a3}, {"a4", l.a4},
        {"b1", l.b1}, {"b2", l.b2}, {"b3", l.b3}, {"b4", l.b4},
        {"a3_prime", l.a3_prime}, {"b3_prime", l.b3_prime}, {"a2_prime", l.a2_prime},
    };
}

IndexSet get_set(const json& sets, const char* name) {
    return sets.at(name).get<IndexSet>();
}

void check_partition(const IndexLayout& l) {
    auto check_cover = [&](std::vector<const IndexSet*> parts, const char* what) {
        std::vector<int> seen(l.n, 0);
        for (const auto* p : parts)
            for (int j : *p) {
                if (j < 0 || j >= l.n || seen[j]++)
                    throw std::invalid_argument(std::string("layout file: ") + what +
                                                " is not a partition of [0, n)");
            }
        for (int j = 0; j < l.n; ++j)
            if (!seen[j])
                throw std::invalid_argument(std::string("layout file: ") + what +
                                            " is not a partition of [0, n)");
    };
    check_cover({&l.a1, &l.a2, &l.a3, &l.a4}, "a1..a4");
    check_cover({&l.b1, &l.b2, &l.b3, &l.b4}, "b1..b4");
}

}  // namespace

std::uint64_t layout_hash(const IndexLayout& l) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](long v) {
        for (int i = 0; i < 8; ++i) {
            h ^= static_cast<unsigned char>(v >> (8 * i));
            h *= 0x100000001b3ULL;
        }
    };
    mix(l.n);
    mix(static_cast<long>(l.delta * 1e12));
    for (const IndexSet* s : {&l.v_x, &l.h_x, &l.h_x_given_y, &l.v_u_given_xs, &l.h_u_given_xs,
                              &l.h_u_given_x, &l.a1, &l.a2, &l.a3, &l.a4, &l.b1, &l.b3, &l.b4,
                              &l.a3_prime, &l.b3_prime, &l.a2_prime}) {
        mix(static_cast<long>(s->size()));
        for (int j : *s) mix(j);
    }
    return h;
}

void write_layout_file(const std::string& path, const IndexLayout& l, const LayoutFileMeta& meta) {
    json j;
    j["format"] = "coordsim-layout-v1";
    j["spec_hash"] = hash_hex(meta.spec_hash);
    j["n"] = l.n;
    j["delta"] = l.delta;
    j["feasible"] = l.feasible;
    j["profile"] = {
        {"method", meta.method == ProfileMethod::Exact ? "exact" : "monte_carlo"},
        {"samples", meta.samples},
        {"seed", meta.seed},
    };
    put_sets(j, l);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write layout file: " + path);
    out << j.dump(1) << "\n";
}

IndexLayout read_layout_file(const std::string& path, std::uint64_t expected_spec_hash,
                             LayoutFileMeta* meta_out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read layout file: " + path);
    json j = json::parse(in);
    if (j.at("format").get<std::string>() != "coordsim-layout-v1")
        throw std::runtime_error("layout file: unknown format");
    const std::uint64_t file_hash = parse_hash_hex(j.at("spec_hash").get<std::string>());
    if (file_hash != expected_spec_hash)
        throw std::runtime_error("layout file: spec hash mismatch (file " +
                                 j.at("spec_hash").get<std::string>() + ", expected " +
                                 hash_hex(expected_spec_hash) + ")");
    IndexLayout l;
    l.n = j.at("n").get<int>();
    l.delta = j.at("delta").get<double>();
    l.feasible = j.at("feasible").get<bool>();
    const json& sets = j.at("sets");
    l.v_x = get_set(sets, "v_x");
    l.h_x = get_set(sets, "h_x");
    l.h_x_given_y = get_set(sets, "h_x_given_y");
    l.v_u_given_xs = get_set(sets, "v_u_given_xs");
    l.h_u_given_xs = get_set(sets, "h_u_given_xs");
    l.h_u_given_x = get_set(sets, "h_u_given_x");
    l.a1 = get_set(sets, "a1");
    l.a2 = get_set(sets, "a2");
    l.a3 = get_set(sets, "a3");
    l.a4 = get_set(sets, "a4");
    l.b1 = get_set(sets, "b1");
    l.b2 = get_set(sets, "b2");
    l.b3 = get_set(sets, "b3");
    l.b4 = get_set(sets, "b4");
    l.a3_prime = get_set(sets, "a3_prime");
    l.b3_prime = get_set(sets, "b3_prime");
    l.a2_prime = get_set(sets, "a2_prime");
    check_partition(l);
    if (meta_out) {
        meta_out->spec_hash = file_hash;
        const json& p = j.at("profile");
        meta_out->method = p.at("method").get<std::string>() == "exact" ? ProfileMethod::Exact
                                                                        : ProfileMethod::MonteCarlo;
        meta_out->samples = p.at("samples").get<long>();
        meta_out->seed = p.at("seed").get<std::uint64_t>();
    }
    return l;
}

}  // namespace coordsim
