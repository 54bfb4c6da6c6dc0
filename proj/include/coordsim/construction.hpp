#pragma once

// Entropy profiling of the transformed blocks and the index-set layout that
// drives encoding: very-high/high entropy sets, the A/B partitions, and the
// chaining sub-allocations carved out of A2.
//
// Index convention: positions are 0-based throughout the implementation and in
// serialized layouts; position p corresponds to the (p+1)-th transformed bit.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coordsim/polar.hpp"
#include "coordsim/probmodel.hpp"

namespace coordsim {

// The four conditional-entropy profiles the layout needs:
//   ZMarginal: H(Z_j | Z-prefix)            with Z = X G_n
//   ZGivenY:   H(Z_j | Z-prefix, Y-block)
//   VGivenXS:  H(V_j | V-prefix, X-block, S-block)   with V = U G_n
//   VGivenX:   H(V_j | V-prefix, X-block)
enum class ProfileTarget { ZMarginal, ZGivenY, VGivenXS, VGivenX };
enum class ProfileMethod { Exact, MonteCarlo };

const char* profile_target_name(ProfileTarget t);

// The per-position bit law and the side-symbol marginal that realize one
// profile target as an i.i.d.-given-side process.
struct ProfileModel {
    ScModel model;
    FiniteDist side_marginal;
};

ProfileModel make_profile_model(const CoordinationSpec& spec, ProfileTarget target);

struct EntropyProfile {
    int n = 0;
    std::vector<double> h;        // estimated H per position, clipped to [0, 1]
    std::vector<double> std_err;  // per-position standard error; zero when exact
    ProfileMethod method = ProfileMethod::MonteCarlo;
    long sample_count = 0;
};

// Profile one target.  Exact mode runs the exhaustive oracle (small n only);
// Monte Carlo draws `samples` blocks and averages -log2 of the realized
// conditionals.  Deterministic for fixed (seed, samples) at any worker count.
EntropyProfile profile_entropies(const CoordinationSpec& spec, int n, ProfileTarget target,
                                 ProfileMethod method, long samples = 10000,
                                 std::uint64_t seed = 1, int workers = 1);

// Generic Monte Carlo profiler over an explicit model (used internally and by
// the channel-code construction).  `stream_label` separates randomness between
// concurrent profile families under the same seed.
EntropyProfile monte_carlo_profile(const ProfileModel& pm, int n, long samples,
                                   std::uint64_t seed, std::uint64_t stream_label,
                                   int workers = 1);

struct FourProfiles {
    EntropyProfile z_marginal, z_given_y, v_given_xs, v_given_x;
};

FourProfiles profile_all(const CoordinationSpec& spec, int n, ProfileMethod method,
                         long samples = 10000, std::uint64_t seed = 1, int workers = 1);

using IndexSet = std::vector<int>;  // strictly increasing, 0-based positions

struct InfeasibleLayoutError : std::runtime_error {
    explicit InfeasibleLayoutError(const std::string& what) : std::runtime_error(what) {}
};

struct IndexLayout {
    int n = 0;
    double delta = 0.0;
    // Thresholded entropy sets.
    IndexSet v_x, h_x, h_x_given_y;
    IndexSet v_u_given_xs, h_u_given_xs, h_u_given_x;
    // Signal-side partition of [0, n).
    IndexSet a1, a2, a3, a4;
    // Auxiliary-side partition; b2 is provably empty and verified so.
    IndexSet b1, b2, b3, b4;
    // Chaining allocations inside a2 (empty when infeasible).
    IndexSet a3_prime, b3_prime, a2_prime;
    bool feasible = false;  // |a2| >= |a3| + |b3|
};

// Threshold the profiles at delta and partition.  Throws InfeasibleLayoutError
// when chaining does not fit, unless allow_infeasible is set (single-block
// runs need no chaining).  Throws std::logic_error if the provably-empty b2
// turns out nonempty (profile estimates are inconsistent).
IndexLayout build_layout(const FourProfiles& profiles, double delta, bool allow_infeasible = false);

struct RateReport {
    double cr_rate;  // (|a1|+|a3|+|b1|+|b3|) / (k n)
    int slack;       // |a2| - |a3| - |b3|
    double frac_v_x, frac_h_x_given_y;
    double frac_a1, frac_a2, frac_a3, frac_a4;
    double frac_b1, frac_b3, frac_b4;
};

RateReport rate_report(const IndexLayout& layout, int k);

// Layout cache files: JSON with a spec hash, the construction parameters, and
// every index set.  Loading verifies the hash and the partition invariants.
struct LayoutFileMeta {
    std::uint64_t spec_hash = 0;
    ProfileMethod method = ProfileMethod::MonteCarlo;
    long samples = 0;
    std::uint64_t seed = 0;
};

void write_layout_file(const std::string& path, const IndexLayout& layout,
                       const LayoutFileMeta& meta);
IndexLayout read_layout_file(const std::string& path, std::uint64_t expected_spec_hash,
                             LayoutFileMeta* meta_out = nullptr);

// FNV-1a content hash of a layout (used to tag CSV output for replay).
std::uint64_t layout_hash(const IndexLayout& layout);

}  // namespace coordsim
