#pragma once

// Finite probability distributions, conditional kernels, and the five-kernel
// coordination setup (source S, actuator input X, auxiliary U, channel output Y,
// reconstruction Shat) together with the information measures on their joint law.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace coordsim {

// Probability mass function on {0, ..., size-1}.  Entries must be nonnegative
// and sum to 1 within 1e-6; small drift is renormalized, larger drift rejected.
class FiniteDist {
public:
    explicit FiniteDist(std::vector<double> probs);
    static FiniteDist uniform(int size);
    static FiniteDist bernoulli(double p1);  // P(1) = p1

    int size() const { return static_cast<int>(p_.size()); }
    double prob(int i) const { return p_.at(i); }
    const std::vector<double>& probs() const { return p_; }

private:
    std::vector<double> p_;
};

// Row-stochastic kernel P(output | inputs).  Inputs form a tuple with the given
// alphabet sizes; the row index is the mixed-radix rank of the tuple, first
// input varying slowest.
class CondDist {
public:
    CondDist(std::vector<int> input_sizes, int output_size, std::vector<double> table);
    static CondDist bsc(double flip);             // binary symmetric kernel
    static CondDist identity(int size);           // deterministic copy

    const std::vector<int>& input_sizes() const { return in_sizes_; }
    int output_size() const { return out_size_; }
    int num_rows() const { return rows_; }

    int row_index(std::span<const int> inputs) const;
    std::span<const double> row(std::span<const int> inputs) const;
    std::span<const double> row_at(int row) const;
    double prob(std::span<const int> inputs, int output) const;

private:
    std::vector<int> in_sizes_;
    int out_size_;
    int rows_;
    std::vector<double> table_;  // rows_ x out_size_, row-major
};

// The full problem instance: P_S, P_X, P_{U|X,S}, channel P_{Y|X}, and the
// reconstruction kernel P_{Shat|U,Y}.  X and U are required to be binary (the
// block transform operates on bits); S, Y, Shat may have any finite alphabet.
struct CoordinationSpec {
    FiniteDist source;        // P_S
    FiniteDist input;         // P_X
    CondDist aux_given_xs;    // P_{U|X,S}, inputs (x, s)
    CondDist channel;         // P_{Y|X}, input (x)
    CondDist recon_given_uy;  // P_{Shat|U,Y}, inputs (u, y)

    CoordinationSpec(FiniteDist source, FiniteDist input, CondDist aux_given_xs,
                     CondDist channel, CondDist recon_given_uy);

    int s_size() const { return source.size(); }
    int x_size() const { return 2; }
    int u_size() const { return 2; }
    int y_size() const { return channel.output_size(); }
    int shat_size() const { return recon_given_uy.output_size(); }

    // P_{U|X} with S marginalized out.
    CondDist aux_given_x() const;
    // Stable 64-bit content hash (used to key cached constructions).
    std::uint64_t hash() const;
};

// Dense joint distribution over a tuple of named finite variables.
class JointDist {
public:
    JointDist(std::vector<std::string> names, std::vector<int> dims, std::vector<double> probs);

    const std::vector<std::string>& names() const { return names_; }
    const std::vector<int>& dims() const { return dims_; }
    const std::vector<double>& probs() const { return p_; }
    int dim_of(const std::string& name) const;

    double prob(std::span<const int> idx) const;
    JointDist marginal(std::span<const std::string> keep) const;

private:
    int index_of(const std::string& name) const;

    std::vector<std::string> names_;
    std::vector<int> dims_;
    std::vector<double> p_;
};

// Joint law P(s, x, u, y, shat) induced by a spec, with variable names
// "S", "X", "U", "Y", "Shat" in that order.
JointDist joint(const CoordinationSpec& spec);

// Information measures in bits; 0 log 0 = 0 throughout.
double entropy(const FiniteDist& p);
double entropy(const JointDist& j, std::span<const std::string> vars);
double conditional_entropy(const JointDist& j, std::span<const std::string> vars,
                           std::span<const std::string> given);
double mutual_information(const JointDist& j, std::span<const std::string> a,
                          std::span<const std::string> b);
double conditional_mutual_information(const JointDist& j, std::span<const std::string> a,
                                      std::span<const std::string> b,
                                      std::span<const std::string> given);
double binary_entropy(double p);

// Achievability check for the target region: I(X,U; S) <= I(X,U; Y).
struct RegionReport {
    double rate_needed;     // I(X,U; S)
    double rate_available;  // I(X,U; Y)
    double slack;           // available - needed
    bool inside;            // slack >= 0
    // Structural identities of the setup, reported for diagnostics:
    double i_xu_s;   // equals I(U; S | X) since S is independent of X
    double i_xu_y;   // equals I(X; Y) since (U,S) - X - Y is a Markov chain
};

RegionReport check_region(const CoordinationSpec& spec);

}  // namespace coordsim
