// Regenerates the frozen oracle fixtures under tests/fixtures/.  Every value
// written here comes from the exhaustive-enumeration oracles or from a full
// pipeline run; nothing is typed in by hand.  Rerun after any intentional
// change to the probability model, the randomness streams, or the layouts,
// and commit the diff.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coordsim/channelsim.hpp"
#include "coordsim/construction.hpp"
#include "coordsim/polar.hpp"
#include "coordsim/probmodel.hpp"
#include "coordsim/scenario.hpp"
#include "coordsim/validation.hpp"

using namespace coordsim;
using nlohmann::json;

namespace {

void dump(const std::string& dir, const std::string& name, const json& j) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path);
    if (!out) {
        std::fprintf(stderr, "cannot write %s\n", path.c_str());
        std::exit(1);
    }
    out << j.dump(1) << "\n";
    std::printf("wrote %s\n", path.c_str());
}

ProfileModel model_by_name(const CoordinationSpec& spec, const std::string& name) {
    if (name == "uncond-bern-0.3")
        return ProfileModel{ScModel::unconditional(FiniteDist::bernoulli(0.3)),
                            FiniteDist::uniform(1)};
    for (ProfileTarget t : {ProfileTarget::ZMarginal, ProfileTarget::ZGivenY,
                            ProfileTarget::VGivenXS, ProfileTarget::VGivenX})
        if (name == profile_target_name(t)) return make_profile_model(spec, t);
    std::fprintf(stderr, "unknown model name %s\n", name.c_str());
    std::exit(1);
}

json sc_oracle_cases(const CoordinationSpec& spec) {
    json cases = json::array();
    RandomnessStreams rng(20240915);
    const std::vector<std::string> models = {"uncond-bern-0.3", "z_given_y", "v_given_xs"};
    for (const auto& name : models) {
        const ProfileModel pm = model_by_name(spec, name);
        for (int n : {2, 4, 8}) {
            for (int rep = 0; rep < 8; ++rep) {
                Substream s = rng.stream(StreamKind::Source, 99, cases.size());
                std::vector<int> side(n);
                for (int t = 0; t < n; ++t) side[t] = s.draw_symbol(pm.side_marginal);
                const SymbolBlock w(side, pm.model.side_alphabet());
                const int j = 1 + static_cast<int>(s.draw() * n);
                // Walk the engine to produce a possible prefix, then freeze the
                // exhaustive-enumeration answer for position j.
                ScProcess proc(pm.model, w);
                std::vector<Bit> prefix;
                for (int t = 0; t < j - 1; ++t) {
                    const Bit b = s.draw() < proc.prob0() ? 0 : 1;
                    proc.commit(b);
                    prefix.push_back(b);
                }
                json c;
                c["model"] = name;
                c["n"] = n;
                c["side"] = side;
                c["prefix"] = prefix;
                c["j"] = j;
                c["p0"] = brute_sc_probability(pm.model, w, prefix, j);
                cases.push_back(std::move(c));
            }
        }
    }
    return json{{"cases", cases}};
}

json exact_profiles_n8(const CoordinationSpec& spec) {
    json out;
    for (ProfileTarget t : {ProfileTarget::ZMarginal, ProfileTarget::ZGivenY,
                            ProfileTarget::VGivenXS, ProfileTarget::VGivenX}) {
        const EntropyProfile p = exact_entropy_profile(spec, 8, t);
        out[profile_target_name(t)] = p.h;
    }
    return out;
}

json encoder_identity_n4(const CoordinationSpec& spec) {
    const FourProfiles profiles = profile_all(spec, 4, ProfileMethod::Exact);
    const IndexLayout layout = build_layout(profiles, 0.25, true);
    const EncoderLawReport z = exact_encoder_distribution(spec, layout);
    const EncoderVLawReport v = exact_encoder_v_distribution(spec, layout);
    const JointLawReport jt = exact_joint_encoder_report(spec, layout);
    json out;
    out["delta"] = 0.25;
    out["a1"] = layout.a1;
    out["a2"] = layout.a2;
    out["b1"] = layout.b1;
    out["z"] = {{"divergence", z.divergence},
                {"identity_rhs", z.identity_rhs},
                {"variational", z.variational},
                {"p_true", z.p_true},
                {"p_encoder", z.p_encoder}};
    out["v"] = {{"divergence", v.divergence},
                {"identity_rhs", v.identity_rhs},
                {"variational", v.variational}};
    out["joint"] = {{"d1", jt.d1},
                    {"d2", jt.d2},
                    {"d_total", jt.d_total},
                    {"d_joint_direct", jt.d_joint_direct},
                    {"variational", jt.variational},
                    {"pinsker_bound", jt.pinsker_bound}};
    return out;
}

json region_fixture() {
    json out;
    for (const auto& name : preset_names()) {
        const Scenario sc = scenario_preset(name);
        const RegionReport r = check_region(sc.spec);
        out[name] = {{"rate_needed", r.rate_needed},
                     {"rate_available", r.rate_available},
                     {"slack", r.slack},
                     {"inside", r.inside},
                     {"i_xu_s", r.i_xu_s},
                     {"i_xu_y", r.i_xu_y}};
    }
    return out;
}

void layout_fixture(const std::string& dir) {
    const Scenario sc = scenario_preset("bsc-scenario");
    const FourProfiles profiles =
        profile_all(sc.spec, 1024, ProfileMethod::MonteCarlo, 10000, sc.construction_seed);
    const IndexLayout layout = build_layout(profiles, 0.1, true);
    LayoutFileMeta meta;
    meta.spec_hash = sc.spec.hash();
    meta.method = ProfileMethod::MonteCarlo;
    meta.samples = 10000;
    meta.seed = sc.construction_seed;
    write_layout_file(dir + "/layout_bsc_n1024_delta0.1.json", layout, meta);
    std::printf("wrote %s/layout_bsc_n1024_delta0.1.json\n", dir.c_str());

    const RateReport rr = rate_report(layout, 4);
    json expect;
    expect["hash"] = layout_hash(layout);
    expect["feasible"] = layout.feasible;
    expect["sizes"] = {{"v_x", layout.v_x.size()},       {"h_x_given_y", layout.h_x_given_y.size()},
                       {"a1", layout.a1.size()},         {"a2", layout.a2.size()},
                       {"a3", layout.a3.size()},         {"a4", layout.a4.size()},
                       {"b1", layout.b1.size()},         {"b3", layout.b3.size()},
                       {"b4", layout.b4.size()}};
    expect["cr_rate_k4"] = rr.cr_rate;
    dump(dir, "layout_expect.json", expect);
}

void golden_run(const std::string& dir) {
    Scenario sc = scenario_preset("bsc-scenario");
    sc.n_list = {64};
    sc.k = 2;
    sc.delta = 0.2;
    sc.seeds = {1, 2, 3};
    sc.samples = 4000;
    const ExperimentResult result = run_experiment(sc);
    const std::string path = dir + "/golden_run.csv";
    std::ofstream out(path);
    out << to_csv(result, false);
    std::printf("wrote %s\n", path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "tests/fixtures";
    const Scenario sc = scenario_preset("bsc-scenario");
    dump(dir, "sc_oracle.json", sc_oracle_cases(sc.spec));
    dump(dir, "profiles_exact_n8.json", exact_profiles_n8(sc.spec));
    dump(dir, "encoder_identity_n4.json", encoder_identity_n4(sc.spec));
    dump(dir, "region.json", region_fixture());
    layout_fixture(dir);
    golden_run(dir);
    return 0;
}
