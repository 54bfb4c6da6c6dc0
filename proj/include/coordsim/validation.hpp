#pragma once

// Brute-force oracles at tiny n: exhaustive successive-cancellation
// conditionals, exact entropy profiles, and the exact encoder-induced laws
// behind the divergence identity and its Pinsker consequence.  Everything here
// marginalizes directly over all pre-transform inputs and side sequences,
// sharing nothing with the engine under test except the transform itself.

#include <optional>
#include <string>
#include <vector>

#include "coordsim/construction.hpp"
#include "coordsim/polar.hpp"
#include "coordsim/probmodel.hpp"

namespace coordsim {

struct OracleReport {
    std::string quantity;
    std::vector<double> exact;
    std::vector<double> engine;

    double max_abs_deviation() const;
    bool pass(double tol) const { return max_abs_deviation() <= tol; }
};

// P(Z_j = 0 | prefix, side) by direct sum over all 2^n pre-transform inputs
// consistent with the prefix.  n <= 16.
double brute_sc_probability(const ScModel& model, const SymbolBlock& side,
                            std::span<const Bit> prefix, int j);

// Exact conditional-entropy profile by full expectation over inputs and side
// sequences.  Capped at n <= 16, side alphabet <= 4, and bounded total work.
EntropyProfile exact_entropy_profile(const CoordinationSpec& spec, int n, ProfileTarget target);
EntropyProfile exact_entropy_profile_model(const ProfileModel& pm, int n);

// Exact law of the first encoded signal block and its divergence from the
// target law.  With `fixed_c1` unset, the frozen bits are averaged out
// (uniform), which is the regime where the divergence identity
//   D(P_Z || P_Z~) = sum over a1 u a2 of (1 - H(Z_j | Z-prefix))
// holds exactly at every block length.
struct EncoderLawReport {
    std::vector<double> p_true;     // P_Z over 2^n, position j = bit j of index
    std::vector<double> p_encoder;  // encoder-induced law of the first block
    double divergence;              // D(p_true || p_encoder), bits
    double identity_rhs;            // sum over the uniformized index set of (1 - H_j)
    double variational;             // V(p_true, p_encoder)
};

EncoderLawReport exact_encoder_distribution(const CoordinationSpec& spec, const IndexLayout& layout,
                                            std::optional<std::vector<Bit>> fixed_c1 = std::nullopt);

// Same identity for the auxiliary chain: conditional divergence between the
// true law of V given (X, S) and the encoder's, averaged over the product law
// of (X, S) blocks.  n <= 8 with binary S kept well inside the work cap.
struct EncoderVLawReport {
    double divergence;    // D_2 term
    double identity_rhs;  // sum over b1 u b2 of (1 - H(V_j | V-prefix, X, S))
    double variational;   // average conditional L1 distance
};

EncoderVLawReport exact_encoder_v_distribution(const CoordinationSpec& spec,
                                               const IndexLayout& layout);

// Joint check over (S-block, Z, V) at n <= 4: the two divergence terms add up
// along the chain rule, and the variational distance between the encoder's
// joint law and the i.i.d. target obeys Pinsker's inequality.
struct JointLawReport {
    double d1, d2;
    double d_total;         // d1 + d2
    double d_joint_direct;  // D computed directly on the joint tables
    double variational;     // V between the two joints
    double pinsker_bound;   // sqrt(2 ln2 d_total)
};

JointLawReport exact_joint_encoder_report(const CoordinationSpec& spec, const IndexLayout& layout);

}  // namespace coordsim
