#pragma once

// Binary polarization transform and the successive-cancellation probability
// engine.  The transform is the m-fold Kronecker power of [[1,0],[1,1]] over
// GF(2) in natural order (no bit reversal); applying it twice is the identity.
//
// The engine walks positions j = 1..n of the transformed block and exposes the
// conditional law P(Z_j | Z_1..Z_{j-1}, side info) for blocks whose
// pre-transform bits are independent across positions given per-position side
// symbols.  A full sequential pass costs O(n log n).

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "coordsim/probmodel.hpp"

namespace coordsim {

using Bit = std::uint8_t;

struct BitBlock {
    std::vector<Bit> bits;

    BitBlock() = default;
    explicit BitBlock(int n) : bits(n, 0) {}
    explicit BitBlock(std::vector<Bit> b) : bits(std::move(b)) {}
    int n() const { return static_cast<int>(bits.size()); }
    Bit& operator[](int i) { return bits[i]; }
    Bit operator[](int i) const { return bits[i]; }
};

struct SymbolBlock {
    std::vector<int> symbols;
    int alphabet_size = 1;

    SymbolBlock() = default;
    SymbolBlock(std::vector<int> s, int alphabet) : symbols(std::move(s)), alphabet_size(alphabet) {}
    static SymbolBlock constant(int n, int symbol, int alphabet);
    static SymbolBlock from_bits(const BitBlock& b);
    int n() const { return static_cast<int>(symbols.size()); }
    int operator[](int i) const { return symbols[i]; }
};

// Pair two symbol blocks into one over the product alphabet, first coordinate
// varying slowest (matches CondDist row indexing for two-input kernels).
SymbolBlock zip_symbols(const SymbolBlock& a, const SymbolBlock& b);

bool is_power_of_two(int n);

// In-place transform: for each block half, XOR the second half into the first.
void polar_transform_inplace(std::span<Bit> bits);
BitBlock polar_transform(const BitBlock& x);

// Raised when a conditional law degenerates to total probability zero, i.e.
// the committed prefix is impossible under the model and side info.
struct ZeroProbabilityError : std::runtime_error {
    ZeroProbabilityError() : std::runtime_error("conditional law has zero total probability") {}
};

// Per-position bit model: a law P(bit | w) for each side symbol w.  A model
// with side alphabet 1 is an unconditional bit source.
class ScModel {
public:
    explicit ScModel(CondDist bit_given_side);
    static ScModel unconditional(const FiniteDist& bit_dist);

    int side_alphabet() const { return side_size_; }
    std::array<double, 2> law(int w) const;

private:
    CondDist dist_;
    int side_size_;
};

// Stateful successive-cancellation walk over one block.  Feed it the leaf laws
// (via a model plus side block, or directly), then alternate law queries and
// commits in position order.  `reset` reuses allocated storage.
class ScProcess {
public:
    // What to do when a conditional law degenerates: raise, or substitute the
    // uniform law and record the event (decoding wants best-effort behavior).
    enum class ZeroPolicy { Throw, FlagUniform };

    ScProcess() = default;
    ScProcess(const ScModel& model, const SymbolBlock& side, ZeroPolicy policy = ZeroPolicy::Throw);
    explicit ScProcess(std::span<const std::array<double, 2>> leaf_laws,
                       ZeroPolicy policy = ZeroPolicy::Throw);

    void reset(const ScModel& model, const SymbolBlock& side, ZeroPolicy policy = ZeroPolicy::Throw);
    void reset(std::span<const std::array<double, 2>> leaf_laws,
               ZeroPolicy policy = ZeroPolicy::Throw);

    int n() const { return n_; }
    // 1-based position of the next undecided bit; n+1 once the block is done.
    int position() const { return static_cast<int>(committed_.size()) + 1; }
    bool done() const { return static_cast<int>(committed_.size()) == n_; }

    // Conditional law of the next bit given everything committed so far.
    std::array<double, 2> law();
    double prob0() { return law()[0]; }
    // Likelihood ratio P(0|.) / P(1|.); +infinity when P(1|.) = 0.
    double llr();
    void commit(Bit b);

    const std::vector<Bit>& committed() const { return committed_; }
    bool flagged() const { return flagged_; }

private:
    void ensure_path();
    std::array<double, 2> resolve(double w0, double w1);

    int n_ = 0, m_ = 0;
    ZeroPolicy policy_ = ZeroPolicy::Throw;
    bool flagged_ = false;
    std::vector<std::vector<std::array<double, 2>>> law_;  // per depth, active node laws
    std::vector<std::vector<Bit>> zbits_;                  // per depth, active node decided bits
    std::vector<long> built_;                              // per depth, id of node held in law_
    std::vector<Bit> scratch_;
    std::vector<Bit> committed_;
    long cur_ = 0;  // 0-based index of next position
};

// One-shot conveniences built on ScProcess.  `prefix` holds the first j-1
// committed bits; both functions answer for position j (1-based).
// sc_prefix_probability returns P(Z_j = 0 | prefix, side); sc_llr returns the
// likelihood ratio P(0|.)/P(1|.).
double sc_prefix_probability(const ScModel& model, const SymbolBlock& side,
                             std::span<const Bit> prefix, int j);
double sc_llr(const ScModel& model, const SymbolBlock& side, std::span<const Bit> prefix, int j);

}  // namespace coordsim
