#include "coordsim/channelsim.hpp"

#include <stdexcept>

namespace coordsim {

namespace {

// splitmix64 finalizer: a full-avalanche 64-bit mix.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kKindSalt = 0xd6e8feb86659fd93ULL;
constexpr std::uint64_t kLabelSalt = 0xa5a3564d1f5b8f3dULL;
constexpr std::uint64_t kBlockSalt = 0x8f1bbcdcbfa53e0bULL;
constexpr std::uint64_t kCounterSalt = 0x2545f4914f6cdd1dULL;

}  // namespace

std::uint64_t Substream::word_at(std::uint64_t counter) const {
    return mix64(key_ ^ (counter * kCounterSalt));
}

double Substream::u01_at(std::uint64_t counter) const {
    return static_cast<double>(word_at(counter) >> 11) * 0x1.0p-53;
}

Bit Substream::bit_at(std::uint64_t counter) const {
    return static_cast<Bit>(word_at(counter) & 1u);
}

int Substream::symbol_at(const FiniteDist& p, std::uint64_t counter) const {
    const double u = u01_at(counter);
    double acc = 0.0;
    const int last = p.size() - 1;
    for (int i = 0; i < last; ++i) {
        acc += p.prob(i);
        if (u < acc) return i;
    }
    return last;
}

Substream RandomnessStreams::stream(StreamKind kind, std::uint64_t label, std::uint64_t block) const {
    std::uint64_t k = mix64(master_ ^ (static_cast<std::uint64_t>(kind) * kKindSalt));
    k = mix64(k ^ (label * kLabelSalt));
    k = mix64(k ^ (block * kBlockSalt));
    return Substream(k);
}

SymbolBlock sample_source(const FiniteDist& p_s, int n, Substream stream) {
    if (n < 0) throw std::invalid_argument("sample_source: negative length");
    std::vector<int> s(n);
    for (int t = 0; t < n; ++t) s[t] = stream.symbol_at(p_s, t);
    return SymbolBlock(std::move(s), p_s.size());
}

SymbolBlock transmit(const BitBlock& x, const CondDist& p_y_given_x, Substream stream) {
    const auto& in = p_y_given_x.input_sizes();
    if (in.size() != 1) throw std::invalid_argument("transmit: channel must condition on x alone");
    std::vector<int> y(x.n());
    for (int t = 0; t < x.n(); ++t) {
        const int sym = x[t];
        if (sym >= in[0]) throw std::out_of_range("transmit: input symbol outside channel alphabet");
        auto row = p_y_given_x.row_at(sym);
        const double u = stream.u01_at(t);
        double acc = 0.0;
        int pick = p_y_given_x.output_size() - 1;
        for (int v = 0; v < p_y_given_x.output_size() - 1; ++v) {
            acc += row[v];
            if (u < acc) {
                pick = v;
                break;
            }
        }
        y[t] = pick;
    }
    return SymbolBlock(std::move(y), p_y_given_x.output_size());
}

}  // namespace coordsim
