#include "coordsim/probmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace coordsim {

namespace {

constexpr double kSumTol = 1e-6;

void check_and_normalize(std::vector<double>& p, const char* what) {
    double sum = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument(std::string(what) + ": entries must be finite and nonnegative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTol)
        throw std::invalid_argument(std::string(what) + ": probabilities sum to " + std::to_string(sum));
    for (double& v : p) v /= sum;
}

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

double entropy_flat(std::span<const double> p) {
    double h = 0.0;
    for (double v : p) h -= xlog2x(v);
    return h;
}

}  // namespace

FiniteDist::FiniteDist(std::vector<double> probs) : p_(std::move(probs)) {
    if (p_.empty()) throw std::invalid_argument("FiniteDist: empty support");
    check_and_normalize(p_, "FiniteDist");
}

FiniteDist FiniteDist::uniform(int size) {
    if (size <= 0) throw std::invalid_argument("FiniteDist::uniform: size must be positive");
    return FiniteDist(std::vector<double>(size, 1.0 / size));
}

FiniteDist FiniteDist::bernoulli(double p1) {
    return FiniteDist({1.0 - p1, p1});
}

CondDist::CondDist(std::vector<int> input_sizes, int output_size, std::vector<double> table)
    : in_sizes_(std::move(input_sizes)), out_size_(output_size) {
    if (out_size_ <= 0) throw std::invalid_argument("CondDist: output size must be positive");
    long rows = 1;
    for (int s : in_sizes_) {
        if (s <= 0) throw std::invalid_argument("CondDist: input sizes must be positive");
        rows *= s;
    }
    rows_ = static_cast<int>(rows);
    if (static_cast<long>(table.size()) != rows * out_size_)
        throw std::invalid_argument("CondDist: table has wrong size");
    table_ = std::move(table);
    for (int r = 0; r < rows_; ++r) {
        std::vector<double> row(table_.begin() + static_cast<long>(r) * out_size_,
                                table_.begin() + static_cast<long>(r + 1) * out_size_);
        check_and_normalize(row, "CondDist row");
        std::copy(row.begin(), row.end(), table_.begin() + static_cast<long>(r) * out_size_);
    }
}

CondDist CondDist::bsc(double flip) {
    if (flip < 0.0 || flip > 1.0) throw std::invalid_argument("CondDist::bsc: flip out of range");
    return CondDist({2}, 2, {1.0 - flip, flip, flip, 1.0 - flip});
}

CondDist CondDist::identity(int size) {
    std::vector<double> t(static_cast<size_t>(size) * size, 0.0);
    for (int i = 0; i < size; ++i) t[static_cast<size_t>(i) * size + i] = 1.0;
    return CondDist({size}, size, std::move(t));
}

int CondDist::row_index(std::span<const int> inputs) const {
    if (inputs.size() != in_sizes_.size())
        throw std::invalid_argument("CondDist: wrong number of inputs");
    int r = 0;
    for (size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i] < 0 || inputs[i] >= in_sizes_[i])
            throw std::out_of_range("CondDist: input symbol out of range");
        r = r * in_sizes_[i] + inputs[i];
    }
    return r;
}

std::span<const double> CondDist::row(std::span<const int> inputs) const {
    return row_at(row_index(inputs));
}

std::span<const double> CondDist::row_at(int row) const {
    if (row < 0 || row >= rows_) throw std::out_of_range("CondDist: row out of range");
    return {table_.data() + static_cast<size_t>(row) * out_size_, static_cast<size_t>(out_size_)};
}

double CondDist::prob(std::span<const int> inputs, int output) const {
    if (output < 0 || output >= out_size_) throw std::out_of_range("CondDist: output out of range");
    return row(inputs)[output];
}

CoordinationSpec::CoordinationSpec(FiniteDist source_, FiniteDist input_, CondDist aux_,
                                   CondDist channel_, CondDist recon_)
    : source(std::move(source_)),
      input(std::move(input_)),
      aux_given_xs(std::move(aux_)),
      channel(std::move(channel_)),
      recon_given_uy(std::move(recon_)) {
    if (input.size() != 2)
        throw std::invalid_argument("CoordinationSpec: X must be binary");
    if (aux_given_xs.output_size() != 2)
        throw std::invalid_argument("CoordinationSpec: U must be binary");
    const auto& as = aux_given_xs.input_sizes();
    if (as.size() != 2 || as[0] != 2 || as[1] != source.size())
        throw std::invalid_argument("CoordinationSpec: P(U|X,S) must take inputs (x, s)");
    const auto& cs = channel.input_sizes();
    if (cs.size() != 1 || cs[0] != 2)
        throw std::invalid_argument("CoordinationSpec: channel input must be X");
    const auto& rs = recon_given_uy.input_sizes();
    if (rs.size() != 2 || rs[0] != 2 || rs[1] != channel.output_size())
        throw std::invalid_argument("CoordinationSpec: P(Shat|U,Y) must take inputs (u, y)");
}

CondDist CoordinationSpec::aux_given_x() const {
    std::vector<double> t(4, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int s = 0; s < s_size(); ++s) {
            const int in[2] = {x, s};
            for (int u = 0; u < 2; ++u)
                t[static_cast<size_t>(x) * 2 + u] += source.prob(s) * aux_given_xs.prob(in, u);
        }
    return CondDist({2}, 2, std::move(t));
}

namespace {

void hash_doubles(std::uint64_t& h, std::span<const double> vals) {
    char buf[32];
    for (double v : vals) {
        int len = std::snprintf(buf, sizeof buf, "%.17g", v);
        for (int i = 0; i < len; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;  // FNV-1a
        }
        h ^= 0x7c;
        h *= 0x100000001b3ULL;
    }
}

void hash_int(std::uint64_t& h, long v) {
    for (int i = 0; i < 8; ++i) {
        h ^= static_cast<unsigned char>(v >> (8 * i));
        h *= 0x100000001b3ULL;
    }
}

}  // namespace

std::uint64_t CoordinationSpec::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    hash_int(h, s_size());
    hash_int(h, y_size());
    hash_int(h, shat_size());
    hash_doubles(h, source.probs());
    hash_doubles(h, input.probs());
    for (int r = 0; r < aux_given_xs.num_rows(); ++r) hash_doubles(h, aux_given_xs.row_at(r));
    for (int r = 0; r < channel.num_rows(); ++r) hash_doubles(h, channel.row_at(r));
    for (int r = 0; r < recon_given_uy.num_rows(); ++r) hash_doubles(h, recon_given_uy.row_at(r));
    return h;
}

JointDist::JointDist(std::vector<std::string> names, std::vector<int> dims, std::vector<double> probs)
    : names_(std::move(names)), dims_(std::move(dims)), p_(std::move(probs)) {
    if (names_.size() != dims_.size())
        throw std::invalid_argument("JointDist: names/dims mismatch");
    long total = 1;
    for (int d : dims_) {
        if (d <= 0) throw std::invalid_argument("JointDist: dims must be positive");
        total *= d;
    }
    if (static_cast<long>(p_.size()) != total)
        throw std::invalid_argument("JointDist: probability table has wrong size");
    check_and_normalize(p_, "JointDist");
}

int JointDist::index_of(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("JointDist: unknown variable \"" + name + "\"");
}

int JointDist::dim_of(const std::string& name) const { return dims_[index_of(name)]; }

double JointDist::prob(std::span<const int> idx) const {
    if (idx.size() != dims_.size()) throw std::invalid_argument("JointDist: wrong index arity");
    long flat = 0;
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= dims_[i]) throw std::out_of_range("JointDist: index out of range");
        flat = flat * dims_[i] + idx[i];
    }
    return p_[flat];
}

JointDist JointDist::marginal(std::span<const std::string> keep) const {
    std::vector<int> axes;
    axes.reserve(keep.size());
    for (const auto& name : keep) {
        int ax = index_of(name);
        if (std::find(axes.begin(), axes.end(), ax) != axes.end())
            throw std::invalid_argument("JointDist: repeated variable \"" + name + "\"");
        axes.push_back(ax);
    }
    std::vector<int> kdims;
    long ksize = 1;
    for (int ax : axes) {
        kdims.push_back(dims_[ax]);
        ksize *= dims_[ax];
    }
    std::vector<double> out(ksize, 0.0);
    std::vector<int> idx(dims_.size(), 0);
    for (long flat = 0; flat < static_cast<long>(p_.size()); ++flat) {
        long rem = flat;
        for (int i = static_cast<int>(dims_.size()) - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(rem % dims_[i]);
            rem /= dims_[i];
        }
        long kflat = 0;
        for (size_t i = 0; i < axes.size(); ++i) kflat = kflat * kdims[i] + idx[axes[i]];
        out[kflat] += p_[flat];
    }
    std::vector<std::string> knames(keep.begin(), keep.end());
    return JointDist(std::move(knames), std::move(kdims), std::move(out));
}

JointDist joint(const CoordinationSpec& spec) {
    const int S = spec.s_size(), Y = spec.y_size(), R = spec.shat_size();
    std::vector<double> p;
    p.reserve(static_cast<size_t>(S) * 2 * 2 * Y * R);
    for (int s = 0; s < S; ++s)
        for (int x = 0; x < 2; ++x)
            for (int u = 0; u < 2; ++u)
                for (int y = 0; y < Y; ++y)
                    for (int r = 0; r < R; ++r) {
                        const int xs[2] = {x, s};
                        const int xin[1] = {x};
                        const int uy[2] = {u, y};
                        p.push_back(spec.source.prob(s) * spec.input.prob(x) *
                                    spec.aux_given_xs.prob(xs, u) * spec.channel.prob(xin, y) *
                                    spec.recon_given_uy.prob(uy, r));
                    }
    return JointDist({"S", "X", "U", "Y", "Shat"}, {S, 2, 2, Y, R}, std::move(p));
}

double entropy(const FiniteDist& p) { return entropy_flat(p.probs()); }

double entropy(const JointDist& j, std::span<const std::string> vars) {
    return entropy_flat(j.marginal(vars).probs());
}

namespace {

std::vector<std::string> concat(std::span<const std::string> a, std::span<const std::string> b) {
    std::vector<std::string> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

double clamp_mi(double v) {
    if (v < 0.0) {
        if (v < -1e-9) throw std::logic_error("mutual information significantly negative");
        return 0.0;
    }
    return v;
}

}  // namespace

double conditional_entropy(const JointDist& j, std::span<const std::string> vars,
                           std::span<const std::string> given) {
    if (given.empty()) return entropy(j, vars);
    auto all = concat(vars, given);
    return entropy(j, all) - entropy(j, given);
}

double mutual_information(const JointDist& j, std::span<const std::string> a,
                          std::span<const std::string> b) {
    auto ab = concat(a, b);
    return clamp_mi(entropy(j, a) + entropy(j, b) - entropy(j, ab));
}

double conditional_mutual_information(const JointDist& j, std::span<const std::string> a,
                                      std::span<const std::string> b,
                                      std::span<const std::string> given) {
    if (given.empty()) return mutual_information(j, a, b);
    auto ag = concat(a, given);
    auto bg = concat(b, given);
    auto abg = concat(a, bg);
    return clamp_mi(entropy(j, ag) + entropy(j, bg) - entropy(j, abg) - entropy(j, given));
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p out of range");
    return -xlog2x(p) - xlog2x(1.0 - p);
}

RegionReport check_region(const CoordinationSpec& spec) {
    JointDist j = joint(spec);
    const std::vector<std::string> xu = {"X", "U"};
    const std::vector<std::string> s = {"S"};
    const std::vector<std::string> y = {"Y"};
    const std::vector<std::string> x = {"X"};
    const std::vector<std::string> u = {"U"};
    RegionReport r{};
    r.rate_needed = mutual_information(j, xu, s);
    r.rate_available = mutual_information(j, xu, y);
    r.slack = r.rate_available - r.rate_needed;
    r.inside = r.slack >= 0.0;
    r.i_xu_s = conditional_mutual_information(j, u, s, x);
    r.i_xu_y = mutual_information(j, x, y);
    return r;
}

}  // namespace coordsim
