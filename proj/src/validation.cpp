#include "coordsim/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coordsim {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Bit t of a packed index holds position t (0-based), i.e. the (t+1)-th
// component of the block.
std::vector<int> transform_permutation(int n) {
    std::vector<int> perm(1L << n);
    std::vector<Bit> bits(n);
    for (long z = 0; z < (1L << n); ++z) {
        for (int t = 0; t < n; ++t) bits[t] = (z >> t) & 1;
        polar_transform_inplace(bits);
        long x = 0;
        for (int t = 0; t < n; ++t) x |= static_cast<long>(bits[t]) << t;
        perm[z] = static_cast<int>(x);
    }
    return perm;
}

// Product law over packed pre-transform blocks from per-position bit laws.
std::vector<double> product_table(const std::vector<std::array<double, 2>>& laws) {
    std::vector<double> p{1.0};
    for (const auto& law : laws) {
        std::vector<double> next(p.size() * 2);
        for (size_t x = 0; x < p.size(); ++x) {
            next[x] = p[x] * law[0];
            next[x + p.size()] = p[x] * law[1];
        }
        p = std::move(next);
    }
    return p;
}

// All prefix marginals of a packed joint law: tables[j] has 2^j entries, the
// law of the first j positions.  tables[0] = {1}.
std::vector<std::vector<double>> prefix_tables(const std::vector<double>& q, int n) {
    std::vector<std::vector<double>> tables(n + 1);
    tables[n] = q;
    for (int j = n; j >= 1; --j) {
        const long half = 1L << (j - 1);
        tables[j - 1].resize(half);
        for (long i = 0; i < half; ++i) tables[j - 1][i] = tables[j][i] + tables[j][i + half];
    }
    return tables;
}

// H(position j | positions < j) from the prefix tables, j 0-based.
double conditional_entropy_at(const std::vector<std::vector<double>>& tables, int j) {
    const auto& joint = tables[j + 1];
    const auto& prior = tables[j];
    const long mask = (1L << j) - 1;
    double h = 0.0;
    for (long idx = 0; idx < static_cast<long>(joint.size()); ++idx) {
        const double pj = joint[idx];
        if (pj <= 0.0) continue;
        h -= pj * std::log2(pj / prior[idx & mask]);
    }
    return h;
}

void check_oracle_size(int n, int side_alphabet) {
    if (n < 1 || n > 16) throw std::invalid_argument("oracle: n must be in [1, 16]");
    if (side_alphabet > 4) throw std::invalid_argument("oracle: side alphabet capped at 4");
    double work = static_cast<double>(n) * std::pow(2.0, n) * std::pow(side_alphabet, n);
    if (work > 8.6e9) throw std::invalid_argument("oracle: instance too large for exact enumeration");
}

}  // namespace

double OracleReport::max_abs_deviation() const {
    if (exact.size() != engine.size())
        throw std::logic_error("OracleReport: exact/engine size mismatch");
    double dev = 0.0;
    for (size_t i = 0; i < exact.size(); ++i) dev = std::max(dev, std::abs(exact[i] - engine[i]));
    return dev;
}

double brute_sc_probability(const ScModel& model, const SymbolBlock& side,
                            std::span<const Bit> prefix, int j) {
    const int n = side.n();
    if (!is_power_of_two(n)) throw std::invalid_argument("brute_sc_probability: n must be a power of two");
    check_oracle_size(n, 1);
    if (j < 1 || j > n || static_cast<int>(prefix.size()) != j - 1)
        throw std::invalid_argument("brute_sc_probability: bad position/prefix");

    std::vector<std::array<double, 2>> laws(n);
    for (int t = 0; t < n; ++t) laws[t] = model.law(side[t]);
    std::vector<Bit> bits(n);
    double num[2] = {0.0, 0.0};
    for (long x = 0; x < (1L << n); ++x) {
        double p = 1.0;
        for (int t = 0; t < n; ++t) {
            bits[t] = (x >> t) & 1;
            p *= laws[t][bits[t]];
        }
        if (p == 0.0) continue;
        polar_transform_inplace(bits);  // bits now hold the transformed block
        bool consistent = true;
        for (int t = 0; t < j - 1; ++t)
            if (bits[t] != prefix[t]) {
                consistent = false;
                break;
            }
        if (consistent) num[bits[j - 1]] += p;
    }
    const double total = num[0] + num[1];
    if (total <= 0.0) throw ZeroProbabilityError();
    return num[0] / total;
}

EntropyProfile exact_entropy_profile_model(const ProfileModel& pm, int n) {
    if (!is_power_of_two(n)) throw std::invalid_argument("exact profile: n must be a power of two");
    const int W = pm.side_marginal.size();
    check_oracle_size(n, W);

    const auto perm = transform_permutation(n);
    std::vector<double> h(n, 0.0);
    std::vector<int> w(n, 0);
    std::vector<std::array<double, 2>> laws(n);
    std::vector<double> q(1L << n);

    bool more = true;
    while (more) {
        double pw = 1.0;
        for (int t = 0; t < n; ++t) pw *= pm.side_marginal.prob(w[t]);
        if (pw > 0.0) {
            for (int t = 0; t < n; ++t) laws[t] = pm.model.law(w[t]);
            const auto px = product_table(laws);
            for (long z = 0; z < static_cast<long>(q.size()); ++z) q[z] = px[perm[z]];
            const auto tables = prefix_tables(q, n);
            for (int j = 0; j < n; ++j) h[j] += pw * conditional_entropy_at(tables, j);
        }
        // Odometer over side vectors.
        more = false;
        for (int t = 0; t < n; ++t) {
            if (++w[t] < W) {
                more = true;
                break;
            }
            w[t] = 0;
        }
    }

    EntropyProfile prof;
    prof.n = n;
    prof.method = ProfileMethod::Exact;
    prof.sample_count = 0;
    prof.h = std::move(h);
    prof.std_err.assign(n, 0.0);
    return prof;
}

EntropyProfile exact_entropy_profile(const CoordinationSpec& spec, int n, ProfileTarget target) {
    return exact_entropy_profile_model(make_profile_model(spec, target), n);
}

namespace {

// Encoder-induced law over packed Z for one block given which positions are
// uniformized (frozen/fresh) vs sampled from the model conditionals.
// `fixed_bits[j] >= 0` pins position j to that bit instead of averaging.
std::vector<double> encoder_law(const std::vector<std::vector<double>>& tables, int n,
                                const std::vector<int>& uniformized,
                                const std::vector<int>& fixed_bits) {
    std::vector<double> law(1L << n);
    for (long z = 0; z < (1L << n); ++z) {
        double p = 1.0;
        for (int j = 0; j < n && p > 0.0; ++j) {
            const int bit = (z >> j) & 1;
            if (uniformized[j]) {
                if (fixed_bits[j] >= 0)
                    p *= bit == fixed_bits[j] ? 1.0 : 0.0;
                else
                    p *= 0.5;
            } else {
                const long pre = z & ((1L << j) - 1);
                const double denom = tables[j][pre];
                if (denom <= 0.0)
                    throw std::domain_error(
                        "encoder law undefined: forced prefix has zero probability under the model");
                p *= tables[j + 1][z & ((1L << (j + 1)) - 1)] / denom;
            }
        }
        law[z] = p;
    }
    return law;
}

double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
        d += p[i] * std::log2(p[i] / q[i]);
    }
    return d < 0.0 ? 0.0 : d;
}

double l1(const std::vector<double>& p, const std::vector<double>& q) {
    double v = 0.0;
    for (size_t i = 0; i < p.size(); ++i) v += std::abs(p[i] - q[i]);
    return v;
}

}  // namespace

EncoderLawReport exact_encoder_distribution(const CoordinationSpec& spec, const IndexLayout& layout,
                                            std::optional<std::vector<Bit>> fixed_c1) {
    const int n = layout.n;
    if (n > 8) throw std::invalid_argument("exact_encoder_distribution: n too large");
    if (fixed_c1 && fixed_c1->size() != layout.a1.size())
        throw std::invalid_argument("exact_encoder_distribution: fixed_c1 length != |a1|");

    const auto pm = make_profile_model(spec, ProfileTarget::ZMarginal);
    const auto perm = transform_permutation(n);
    std::vector<std::array<double, 2>> laws(n);
    for (int t = 0; t < n; ++t) laws[t] = pm.model.law(0);
    const auto px = product_table(laws);
    std::vector<double> q(1L << n);
    for (long z = 0; z < static_cast<long>(q.size()); ++z) q[z] = px[perm[z]];
    const auto tables = prefix_tables(q, n);

    std::vector<int> uniformized(n, 0), fixed_bits(n, -1);
    for (int j : layout.a1) uniformized[j] = 1;
    for (int j : layout.a2) uniformized[j] = 1;
    if (fixed_c1)
        for (size_t r = 0; r < layout.a1.size(); ++r) fixed_bits[layout.a1[r]] = (*fixed_c1)[r];

    EncoderLawReport rep;
    rep.p_true = q;
    rep.p_encoder = encoder_law(tables, n, uniformized, fixed_bits);
    rep.divergence = kl_bits(rep.p_true, rep.p_encoder);
    rep.variational = l1(rep.p_true, rep.p_encoder);
    rep.identity_rhs = 0.0;
    for (int j = 0; j < n; ++j)
        if (uniformized[j]) rep.identity_rhs += 1.0 - conditional_entropy_at(tables, j);
    return rep;
}

EncoderVLawReport exact_encoder_v_distribution(const CoordinationSpec& spec,
                                               const IndexLayout& layout) {
    const int n = layout.n;
    if (n > 8) throw std::invalid_argument("exact_encoder_v_distribution: n too large");
    const auto pm = make_profile_model(spec, ProfileTarget::VGivenXS);
    check_oracle_size(n, pm.side_marginal.size());

    const auto perm = transform_permutation(n);
    std::vector<int> uniformized(n, 0), fixed_bits(n, -1);
    for (int j : layout.b1) uniformized[j] = 1;
    for (int j : layout.b2) uniformized[j] = 1;

    const int W = pm.side_marginal.size();
    std::vector<int> w(n, 0);
    std::vector<std::array<double, 2>> laws(n);
    std::vector<double> qw(1L << n);
    std::vector<double> h(n, 0.0);
    double d2 = 0.0, var = 0.0;

    bool more = true;
    while (more) {
        double pw = 1.0;
        for (int t = 0; t < n; ++t) pw *= pm.side_marginal.prob(w[t]);
        if (pw > 0.0) {
            for (int t = 0; t < n; ++t) laws[t] = pm.model.law(w[t]);
            const auto pu = product_table(laws);
            for (long v = 0; v < static_cast<long>(qw.size()); ++v) qw[v] = pu[perm[v]];
            const auto tables = prefix_tables(qw, n);
            const auto enc = encoder_law(tables, n, uniformized, fixed_bits);
            d2 += pw * kl_bits(qw, enc);
            var += pw * l1(qw, enc);
            for (int j = 0; j < n; ++j) h[j] += pw * conditional_entropy_at(tables, j);
        }
        more = false;
        for (int t = 0; t < n; ++t) {
            if (++w[t] < W) {
                more = true;
                break;
            }
            w[t] = 0;
        }
    }

    EncoderVLawReport rep;
    rep.divergence = d2;
    rep.variational = var;
    rep.identity_rhs = 0.0;
    for (int j = 0; j < n; ++j)
        if (uniformized[j]) rep.identity_rhs += 1.0 - h[j];
    return rep;
}

JointLawReport exact_joint_encoder_report(const CoordinationSpec& spec, const IndexLayout& layout) {
    const int n = layout.n;
    if (n > 4) throw std::invalid_argument("exact_joint_encoder_report: n must be at most 4");
    const int S = spec.s_size();
    double s_vecs = std::pow(static_cast<double>(S), n);
    if (s_vecs > 512) throw std::invalid_argument("exact_joint_encoder_report: source alphabet too large");

    const auto z_rep = exact_encoder_distribution(spec, layout);
    const auto v_rep = exact_encoder_v_distribution(spec, layout);

    const auto pm_v = make_profile_model(spec, ProfileTarget::VGivenXS);
    const auto perm = transform_permutation(n);
    std::vector<int> uniformized(n, 0), fixed_bits(n, -1);
    for (int j : layout.b1) uniformized[j] = 1;

    std::vector<int> s_digits(n, 0);
    std::vector<std::array<double, 2>> laws(n);
    std::vector<double> qw(1L << n);
    double var = 0.0, d_direct = 0.0;

    bool more = true;
    while (more) {
        double ps = 1.0;
        for (int t = 0; t < n; ++t) ps *= spec.source.prob(s_digits[t]);
        if (ps > 0.0) {
            for (long z = 0; z < (1L << n); ++z) {
                const int x = perm[z];
                for (int t = 0; t < n; ++t) {
                    const int xt = (x >> t) & 1;
                    laws[t] = pm_v.model.law(xt * S + s_digits[t]);
                }
                const auto pu = product_table(laws);
                for (long v = 0; v < static_cast<long>(qw.size()); ++v) qw[v] = pu[perm[v]];
                const auto tables = prefix_tables(qw, n);
                const auto enc = encoder_law(tables, n, uniformized, fixed_bits);
                for (long v = 0; v < (1L << n); ++v) {
                    const double p_iid = ps * z_rep.p_true[z] * qw[v];
                    const double p_enc = ps * z_rep.p_encoder[z] * enc[v];
                    var += std::abs(p_iid - p_enc);
                    if (p_iid > 0.0) {
                        if (p_enc <= 0.0) {
                            d_direct = std::numeric_limits<double>::infinity();
                        } else if (d_direct != std::numeric_limits<double>::infinity()) {
                            d_direct += p_iid * std::log2(p_iid / p_enc);
                        }
                    }
                }
            }
        }
        more = false;
        for (int t = 0; t < n; ++t) {
            if (++s_digits[t] < S) {
                more = true;
                break;
            }
            s_digits[t] = 0;
        }
    }

    JointLawReport rep;
    rep.d1 = z_rep.divergence;
    rep.d2 = v_rep.divergence;
    rep.d_total = rep.d1 + rep.d2;
    rep.d_joint_direct = d_direct < 0.0 ? 0.0 : d_direct;
    rep.variational = var;
    rep.pinsker_bound = std::sqrt(2.0 * kLn2 * rep.d_total);
    return rep;
}

}  // namespace coordsim
