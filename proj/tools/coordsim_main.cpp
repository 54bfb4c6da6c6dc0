// Command-line front end: layout construction, experiment runs, the oracle
// validation suite, and CSV aggregation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coordsim/channelsim.hpp"
#include "coordsim/construction.hpp"
#include "coordsim/encoder.hpp"
#include "coordsim/metrics.hpp"
#include "coordsim/polar.hpp"
#include "coordsim/probmodel.hpp"
#include "coordsim/scenario.hpp"
#include "coordsim/validation.hpp"

namespace {

using namespace coordsim;

struct ScenarioArgs {
    std::string preset = "bsc-scenario";
    std::string config;
    std::vector<int> n_list;
    int k = -1;
    double delta = -1.0;
    double beta = -1.0;
    std::vector<std::uint64_t> seeds;
    int num_seeds = -1;
    std::uint64_t first_seed = 1;
    long samples = -1;
    int offset = -1;
    int workers = -1;
    std::uint64_t construction_seed = 0;
    bool has_construction_seed = false;
    bool force = false;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs* a) {
    cmd->add_option("--preset", a->preset, "named scenario preset")->default_str(a->preset);
    cmd->add_option("--config", a->config, "scenario JSON file (overrides --preset)");
    cmd->add_option("--n", a->n_list, "block length(s), powers of two");
    cmd->add_option("--k", a->k, "number of coordinated blocks");
    cmd->add_option("--delta", a->delta, "entropy threshold in (0, 0.5)");
    cmd->add_option("--beta", a->beta, "threshold shaping exponent (delta = 2^-n^beta)");
    cmd->add_option("--seed", a->seeds, "explicit run seed(s)");
    cmd->add_option("--num-seeds", a->num_seeds, "run seeds first-seed .. first-seed+count-1");
    cmd->add_option("--first-seed", a->first_seed, "first seed for --num-seeds");
    cmd->add_option("--samples", a->samples, "Monte Carlo samples per construction");
    cmd->add_option("--offset", a->offset, "source conditioning offset (0 or 1)")
        ->check(CLI::Range(0, 1));
    cmd->add_option("--workers", a->workers, "worker threads");
    cmd->add_option("--construction-seed", a->construction_seed, "construction stream seed")
        ->each([a](const std::string&) { a->has_construction_seed = true; });
    cmd->add_flag("--force", a->force, "run even if the region check or chaining fails");
}

Scenario make_scenario(const ScenarioArgs& a) {
    Scenario sc = a.config.empty() ? scenario_preset(a.preset) : scenario_from_file(a.config);
    if (!a.n_list.empty()) sc.n_list = a.n_list;
    if (a.k > 0) sc.k = a.k;
    if (a.delta >= 0) sc.delta = a.delta;
    if (a.beta >= 0) sc.beta = a.beta;
    if (!a.seeds.empty()) sc.seeds = a.seeds;
    if (a.num_seeds > 0) {
        sc.seeds.clear();
        for (int s = 0; s < a.num_seeds; ++s) sc.seeds.push_back(a.first_seed + s);
    }
    if (a.samples > 0) sc.samples = a.samples;
    if (a.offset >= 0) sc.source_offset = a.offset;
    if (a.workers > 0) sc.workers = a.workers;
    if (a.has_construction_seed) sc.construction_seed = a.construction_seed;
    if (a.force) sc.force = true;
    for (int n : sc.n_list)
        if (!is_power_of_two(n)) throw CLI::ValidationError("--n", "block length must be 2^m");
    return sc;
}

int cmd_construct(const ScenarioArgs& args, const std::string& out_path, bool exact) {
    Scenario sc = make_scenario(args);
    if (sc.n_list.size() != 1) throw CLI::ValidationError("--n", "construct wants exactly one n");
    const int n = sc.n_list[0];
    const double delta = delta_for(sc, n);
    const ProfileMethod method = exact ? ProfileMethod::Exact : ProfileMethod::MonteCarlo;
    const FourProfiles profiles =
        profile_all(sc.spec, n, method, sc.samples, sc.construction_seed, sc.workers);
    const IndexLayout layout = build_layout(profiles, delta, sc.force);
    if (!out_path.empty()) {
        LayoutFileMeta meta;
        meta.spec_hash = sc.spec.hash();
        meta.method = method;
        meta.samples = exact ? 0 : sc.samples;
        meta.seed = sc.construction_seed;
        write_layout_file(out_path, layout, meta);
    }

    const RateReport rr = rate_report(layout, sc.k);
    std::printf("n=%d delta=%.6g layout_hash=%016llx feasible=%d\n", n, delta,
                static_cast<unsigned long long>(layout_hash(layout)), layout.feasible ? 1 : 0);
    std::printf("|V_X|=%zu |H_X|=%zu |H_X|Y|=%zu |V_U|XS|=%zu |H_U|XS|=%zu |H_U|X|=%zu\n",
                layout.v_x.size(), layout.h_x.size(), layout.h_x_given_y.size(),
                layout.v_u_given_xs.size(), layout.h_u_given_xs.size(), layout.h_u_given_x.size());
    std::printf("|A1|=%zu |A2|=%zu |A3|=%zu |A4|=%zu  |B1|=%zu |B3|=%zu |B4|=%zu  slack=%d\n",
                layout.a1.size(), layout.a2.size(), layout.a3.size(), layout.a4.size(),
                layout.b1.size(), layout.b3.size(), layout.b4.size(), rr.slack);
    std::printf("cr_rate(k=%d)=%.6g  fractions: a1=%.4f a2=%.4f a3=%.4f a4=%.4f b1=%.4f "
                "b3=%.4f b4=%.4f\n",
                sc.k, rr.cr_rate, rr.frac_a1, rr.frac_a2, rr.frac_a3, rr.frac_a4, rr.frac_b1,
                rr.frac_b3, rr.frac_b4);
    if (!out_path.empty()) std::printf("layout written to %s\n", out_path.c_str());
    return 0;
}

int cmd_run(const ScenarioArgs& args, const std::string& out_path, const std::string& layout_path,
            const std::string& trace_prefix, bool no_wall_ms) {
    Scenario sc = make_scenario(args);
    RunOptions options;
    if (!layout_path.empty()) options.layout_path = layout_path;
    if (!trace_prefix.empty()) {
        sc.trace = true;
        options.trace_prefix = trace_prefix;
    }
    const ExperimentResult result = run_experiment(sc, options);
    const std::string csv = to_csv(result, !no_wall_ms);
    if (out_path.empty() || out_path == "-") {
        std::cout << csv;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << csv;
        std::fprintf(stderr, "%zu rows written to %s\n", result.rows.size(), out_path.c_str());
    }
    return 0;
}

bool report_check(const char* name, bool ok, std::string detail) {
    std::printf("%-34s %s  %s\n", name, ok ? "PASS" : "FAIL", detail.c_str());
    return ok;
}

// Oracle suite: engine vs brute force at small n, identities, file round trip.
int cmd_validate(long samples, std::uint64_t seed) {
    bool all = true;
    const Scenario sc = scenario_preset("bsc-scenario");
    const CoordinationSpec& spec = sc.spec;

    {
        bool ok = true;
        RandomnessStreams rng(seed);
        for (int n : {1, 2, 4, 8, 16, 64, 256, 1024}) {
            Substream s = rng.stream(StreamKind::Source, 7, n);
            BitBlock a(n), b(n);
            for (int i = 0; i < n; ++i) a[i] = s.draw_bit(), b[i] = s.draw_bit();
            BitBlock ta = polar_transform(a);
            if (polar_transform(ta).bits != a.bits) ok = false;
            BitBlock ab(n), want(n);
            for (int i = 0; i < n; ++i) ab[i] = a[i] ^ b[i];
            BitBlock tb = polar_transform(b);
            for (int i = 0; i < n; ++i) want[i] = ta[i] ^ tb[i];
            if (polar_transform(ab).bits != want.bits) ok = false;
        }
        all &= report_check("transform involution+linearity", ok, "n up to 1024");
    }
    {
        double worst = 0.0;
        RandomnessStreams rng(seed + 1);
        const ProfileModel pm = make_profile_model(spec, ProfileTarget::VGivenXS);
        for (int n : {2, 4, 8}) {
            for (int rep = 0; rep < 50; ++rep) {
                Substream s = rng.stream(StreamKind::Source, 11, n * 1000 + rep);
                std::vector<int> side(n);
                for (int t = 0; t < n; ++t)
                    side[t] = s.draw_symbol(FiniteDist::uniform(pm.model.side_alphabet()));
                SymbolBlock w(side, pm.model.side_alphabet());
                const int j = 1 + static_cast<int>(s.draw() * n);
                std::vector<Bit> prefix(j - 1);
                try {
                    ScProcess proc(pm.model, w);
                    for (int t = 0; t < j - 1; ++t) {
                        prefix[t] = s.draw() < proc.prob0() ? 0 : 1;
                        proc.commit(prefix[t]);
                    }
                    const double got = sc_prefix_probability(pm.model, w, prefix, j);
                    const double want = brute_sc_probability(pm.model, w, prefix, j);
                    worst = std::max(worst, std::abs(got - want));
                } catch (const ZeroProbabilityError&) {
                }
            }
        }
        all &= report_check("sc engine vs exhaustive oracle", worst <= 1e-9,
                            "max dev " + std::to_string(worst));
    }
    {
        bool ok = true;
        std::string detail;
        for (ProfileTarget t : {ProfileTarget::ZMarginal, ProfileTarget::ZGivenY,
                                ProfileTarget::VGivenXS, ProfileTarget::VGivenX}) {
            const EntropyProfile exact = exact_entropy_profile(spec, 8, t);
            const EntropyProfile mc =
                profile_entropies(spec, 8, t, ProfileMethod::MonteCarlo, samples, seed + 2);
            for (int j = 0; j < 8; ++j) {
                const double err = std::max(mc.std_err[j], 1e-4);
                if (std::abs(mc.h[j] - exact.h[j]) > 4 * err) {
                    ok = false;
                    detail = std::string(profile_target_name(t)) + " index " + std::to_string(j);
                }
            }
        }
        all &= report_check("entropy profiles mc vs exact", ok, detail);
    }
    {
        const FourProfiles profiles = profile_all(spec, 4, ProfileMethod::Exact);
        const IndexLayout layout = build_layout(profiles, 0.25, true);
        const EncoderLawReport z = exact_encoder_distribution(spec, layout);
        const EncoderVLawReport v = exact_encoder_v_distribution(spec, layout);
        const JointLawReport joint = exact_joint_encoder_report(spec, layout);
        const bool ok_z = std::abs(z.divergence - z.identity_rhs) <= 1e-9;
        const bool ok_v = std::abs(v.divergence - v.identity_rhs) <= 1e-9;
        const bool ok_chain = std::abs(joint.d_total - joint.d_joint_direct) <= 1e-9 &&
                              joint.variational <= joint.pinsker_bound + 1e-12;
        all &= report_check("uniformization divergence identity", ok_z && ok_v,
                            "z gap " + std::to_string(std::abs(z.divergence - z.identity_rhs)) +
                                ", v gap " +
                                std::to_string(std::abs(v.divergence - v.identity_rhs)));
        all &= report_check("chain rule + pinsker", ok_chain,
                            "V " + std::to_string(joint.variational) + " <= " +
                                std::to_string(joint.pinsker_bound));
    }
    {
        const FourProfiles profiles =
            profile_all(spec, 64, ProfileMethod::MonteCarlo, samples, seed + 3);
        const IndexLayout layout = build_layout(profiles, 0.2, true);
        LayoutFileMeta meta;
        meta.spec_hash = spec.hash();
        meta.method = ProfileMethod::MonteCarlo;
        meta.samples = samples;
        meta.seed = seed + 3;
        const std::string path = "/tmp/coordsim_validate_layout.json";
        write_layout_file(path, layout, meta);
        const IndexLayout back = read_layout_file(path, spec.hash());
        all &= report_check("layout file round trip", layout_hash(back) == layout_hash(layout),
                            "");
        std::remove(path.c_str());
    }
    return all ? 0 : 1;
}

struct Row {
    std::string scenario;
    int n;
    double v_total, d_proxy;
    int block_err;
};

int cmd_report(const std::vector<std::string>& paths) {
    std::map<std::pair<std::string, int>, std::vector<Row>> groups;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read " + path);
        std::string line;
        std::vector<std::string> header;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (header.empty()) {
                header = cells;
                continue;
            }
            auto col = [&](const std::string& name) -> int {
                for (size_t i = 0; i < header.size(); ++i)
                    if (header[i] == name) return static_cast<int>(i);
                throw std::runtime_error(path + ": missing column " + name);
            };
            Row r;
            r.scenario = cells.at(col("scenario"));
            r.n = std::stoi(cells.at(col("n")));
            r.v_total = std::stod(cells.at(col("V_total")));
            const std::string d = cells.at(col("D_proxy"));
            r.d_proxy = d == "inf" ? std::numeric_limits<double>::infinity() : std::stod(d);
            r.block_err = std::stoi(cells.at(col("block_err_count")));
            groups[{r.scenario, r.n}].push_back(r);
        }
    }
    if (groups.empty()) throw std::runtime_error("no data rows found");

    auto quantile = [](std::vector<double> v, double q) {
        std::sort(v.begin(), v.end());
        const double pos = q * (v.size() - 1);
        const size_t lo = static_cast<size_t>(pos);
        const size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - lo) * (v[hi] - v[lo]);
    };
    std::printf("%-20s %6s %5s %12s %12s %12s %10s\n", "scenario", "n", "runs", "V_median",
                "V_q25", "V_q75", "blkerr/run");
    for (const auto& [key, rows] : groups) {
        std::vector<double> v;
        double err = 0;
        for (const auto& r : rows) {
            v.push_back(r.v_total);
            err += r.block_err;
        }
        std::printf("%-20s %6d %5zu %12.6f %12.6f %12.6f %10.3f\n", key.first.c_str(), key.second,
                    rows.size(), quantile(v, 0.5), quantile(v, 0.25), quantile(v, 0.75),
                    err / rows.size());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"empirical-coordination polar coding simulator"};
    app.require_subcommand(1);

    ScenarioArgs cons_args, run_args;
    std::string cons_out, run_out, run_layout, run_trace;
    bool cons_exact = false, run_no_wall = false;
    long val_samples = 10000;
    std::uint64_t val_seed = 1;
    std::vector<std::string> report_paths;

    CLI::App* cons = app.add_subcommand("construct", "build an index layout and cache it");
    add_scenario_options(cons, &cons_args);
    cons->add_option("--out", cons_out, "layout file to write");
    cons->add_flag("--exact", cons_exact, "exhaustive profiles (small n only)");

    CLI::App* run = app.add_subcommand("run", "run the full encode/transmit/decode pipeline");
    add_scenario_options(run, &run_args);
    run->add_option("--out", run_out, "CSV output path (default stdout)");
    run->add_option("--layout", run_layout, "load a cached layout instead of constructing");
    run->add_option("--trace", run_trace, "write per-run trace JSON files with this prefix");
    run->add_flag("--no-wall-ms", run_no_wall, "omit the wall_ms column (byte-stable output)");

    CLI::App* val = app.add_subcommand("validate", "run the exhaustive-oracle check suite");
    val->add_option("--samples", val_samples, "Monte Carlo samples for profile checks");
    val->add_option("--seed", val_seed, "randomness seed for the checks");

    CLI::App* rep = app.add_subcommand("report", "summarize run CSVs (median/IQR per n)");
    rep->add_option("files", report_paths, "CSV files produced by `run`")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cons->parsed()) return cmd_construct(cons_args, cons_out, cons_exact);
        if (run->parsed())
            return cmd_run(run_args, run_out, run_layout, run_trace, run_no_wall);
        if (val->parsed()) return cmd_validate(val_samples, val_seed);
        if (rep->parsed()) return cmd_report(report_paths);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
