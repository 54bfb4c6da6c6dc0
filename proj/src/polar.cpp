#include "coordsim/polar.hpp"

#include <cmath>
#include <limits>

namespace coordsim {

SymbolBlock SymbolBlock::constant(int n, int symbol, int alphabet) {
    if (symbol < 0 || symbol >= alphabet)
        throw std::invalid_argument("SymbolBlock: symbol out of alphabet");
    return SymbolBlock(std::vector<int>(n, symbol), alphabet);
}

SymbolBlock SymbolBlock::from_bits(const BitBlock& b) {
    std::vector<int> s(b.bits.begin(), b.bits.end());
    return SymbolBlock(std::move(s), 2);
}

SymbolBlock zip_symbols(const SymbolBlock& a, const SymbolBlock& b) {
    if (a.n() != b.n()) throw std::invalid_argument("zip_symbols: length mismatch");
    std::vector<int> s(a.n());
    for (int i = 0; i < a.n(); ++i) s[i] = a[i] * b.alphabet_size + b[i];
    return SymbolBlock(std::move(s), a.alphabet_size * b.alphabet_size);
}

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

void polar_transform_inplace(std::span<Bit> bits) {
    const int n = static_cast<int>(bits.size());
    if (!is_power_of_two(n)) throw std::invalid_argument("polar_transform: length must be a power of two");
    for (int len = n; len >= 2; len >>= 1) {
        const int half = len / 2;
        for (int start = 0; start < n; start += len)
            for (int t = 0; t < half; ++t) bits[start + t] ^= bits[start + t + half];
    }
}

BitBlock polar_transform(const BitBlock& x) {
    BitBlock out = x;
    polar_transform_inplace(out.bits);
    return out;
}

ScModel::ScModel(CondDist bit_given_side) : dist_(std::move(bit_given_side)) {
    if (dist_.output_size() != 2)
        throw std::invalid_argument("ScModel: output must be binary");
    if (dist_.input_sizes().size() != 1)
        throw std::invalid_argument("ScModel: side info must be a single symbol");
    side_size_ = dist_.input_sizes()[0];
}

ScModel ScModel::unconditional(const FiniteDist& bit_dist) {
    if (bit_dist.size() != 2) throw std::invalid_argument("ScModel: bit distribution must be binary");
    return ScModel(CondDist({1}, 2, bit_dist.probs()));
}

std::array<double, 2> ScModel::law(int w) const {
    auto row = dist_.row_at(w);
    return {row[0], row[1]};
}

ScProcess::ScProcess(const ScModel& model, const SymbolBlock& side, ZeroPolicy policy) {
    reset(model, side, policy);
}

ScProcess::ScProcess(std::span<const std::array<double, 2>> leaf_laws, ZeroPolicy policy) {
    reset(leaf_laws, policy);
}

void ScProcess::reset(const ScModel& model, const SymbolBlock& side, ZeroPolicy policy) {
    const int n = side.n();
    if (side.alphabet_size != model.side_alphabet())
        throw std::invalid_argument("ScProcess: side alphabet does not match model");
    std::vector<std::array<double, 2>> laws(n);
    for (int t = 0; t < n; ++t) laws[t] = model.law(side[t]);
    reset(laws, policy);
}

void ScProcess::reset(std::span<const std::array<double, 2>> leaf_laws, ZeroPolicy policy) {
    const int n = static_cast<int>(leaf_laws.size());
    if (!is_power_of_two(n)) throw std::invalid_argument("ScProcess: block length must be a power of two");
    if (n != n_) {
        n_ = n;
        m_ = 0;
        while ((1 << m_) < n) ++m_;
        law_.assign(m_ + 1, {});
        zbits_.assign(m_ + 1, {});
        for (int d = 0; d <= m_; ++d) {
            law_[d].resize(n >> d);
            zbits_[d].resize(n >> d);
        }
        scratch_.resize(n / 2 > 0 ? n / 2 : 1);
        committed_.reserve(n);
    }
    std::copy(leaf_laws.begin(), leaf_laws.end(), law_[0].begin());
    built_.assign(m_ + 1, -1);
    built_[0] = 0;
    committed_.clear();
    cur_ = 0;
    policy_ = policy;
    flagged_ = false;
}

std::array<double, 2> ScProcess::resolve(double w0, double w1) {
    const double s = w0 + w1;
    if (!(s > 0.0) || !std::isfinite(s)) {
        if (policy_ == ZeroPolicy::Throw) throw ZeroProbabilityError();
        flagged_ = true;
        return {0.5, 0.5};
    }
    return {w0 / s, w1 / s};
}

void ScProcess::ensure_path() {
    for (int d = 1; d <= m_; ++d) {
        const long id = cur_ >> (m_ - d);
        if (built_[d] == id) continue;
        const int h = n_ >> d;
        const auto& parent = law_[d - 1];
        auto& node = law_[d];
        if ((id & 1) == 0) {
            // First-half positions: the pair sum is an independent bit source
            // with convolved laws.
            for (int t = 0; t < h; ++t) {
                const auto& a = parent[t];
                const auto& b = parent[t + h];
                node[t] = resolve(a[0] * b[0] + a[1] * b[1], a[0] * b[1] + a[1] * b[0]);
            }
        } else {
            // Second-half positions: condition the lower bits on the pair sums
            // implied by the committed first half of the parent block.
            std::copy_n(zbits_[d - 1].begin(), h, scratch_.begin());
            polar_transform_inplace(std::span<Bit>(scratch_.data(), h));
            for (int t = 0; t < h; ++t) {
                const auto& a = parent[t];
                const auto& b = parent[t + h];
                const Bit e = scratch_[t];
                node[t] = resolve(a[e] * b[0], a[e ^ 1] * b[1]);
            }
        }
        built_[d] = id;
    }
}

std::array<double, 2> ScProcess::law() {
    if (done()) throw std::logic_error("ScProcess: block already complete");
    ensure_path();
    return law_[m_][0];
}

double ScProcess::llr() {
    const auto l = law();
    if (l[1] == 0.0) return std::numeric_limits<double>::infinity();
    return l[0] / l[1];
}

void ScProcess::commit(Bit b) {
    if (b > 1) throw std::invalid_argument("ScProcess: bit must be 0 or 1");
    const auto l = law();
    if (l[b] == 0.0) {
        if (policy_ == ZeroPolicy::Throw) throw ZeroProbabilityError();
        flagged_ = true;
    }
    zbits_[m_][0] = b;
    committed_.push_back(b);
    for (int d = m_; d >= 1; --d) {
        const long suffix = (1L << (m_ - d)) - 1;
        if ((cur_ & suffix) != suffix) break;  // node at depth d not finished yet
        const long id = cur_ >> (m_ - d);
        const int h = n_ >> d;
        std::copy_n(zbits_[d].begin(), h, zbits_[d - 1].begin() + (id & 1) * h);
    }
    ++cur_;
}

double sc_prefix_probability(const ScModel& model, const SymbolBlock& side,
                             std::span<const Bit> prefix, int j) {
    const int n = side.n();
    if (j < 1 || j > n) throw std::invalid_argument("sc_prefix_probability: position out of range");
    if (static_cast<int>(prefix.size()) != j - 1)
        throw std::invalid_argument("sc_prefix_probability: prefix length must be j-1");
    ScProcess proc(model, side);
    for (Bit b : prefix) proc.commit(b);
    return proc.prob0();
}

double sc_llr(const ScModel& model, const SymbolBlock& side, std::span<const Bit> prefix, int j) {
    const int n = side.n();
    if (j < 1 || j > n) throw std::invalid_argument("sc_llr: position out of range");
    if (static_cast<int>(prefix.size()) != j - 1)
        throw std::invalid_argument("sc_llr: prefix length must be j-1");
    ScProcess proc(model, side);
    for (Bit b : prefix) proc.commit(b);
    return proc.llr();
}

}  // namespace coordsim
