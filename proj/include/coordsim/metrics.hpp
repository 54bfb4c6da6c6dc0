#pragma once

// Empirical types (joint histograms across blocks), distances between
// distributions, and the coordination-probability estimate.
//
// Variational distance uses the unnormalized L1 convention throughout:
// V(p, q) = sum |p - q|, with maximum 2.  Much of the literature halves this;
// here the raw sum is kept so that worst-case blocks contribute exactly 2.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coordsim/polar.hpp"
#include "coordsim/probmodel.hpp"

namespace coordsim {

// Dense histogram over a product alphabet of named variables.
class EmpiricalType {
public:
    EmpiricalType(std::vector<std::string> roles, std::vector<int> dims);

    const std::vector<std::string>& roles() const { return roles_; }
    const std::vector<int>& dims() const { return dims_; }
    std::int64_t total() const { return total_; }
    const std::vector<std::int64_t>& counts() const { return counts_; }

    void add(std::span<const int> symbols);
    void merge(const EmpiricalType& other);  // associative pooling
    std::vector<double> normalized() const;
    JointDist distribution() const;

private:
    std::vector<std::string> roles_;
    std::vector<int> dims_;
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

// Pooled type over aligned blocks: variables[v][b] is variable v's symbol
// block for block b; positions are paired across variables per block.
EmpiricalType type_of(std::span<const std::string> roles, std::span<const int> dims,
                      const std::vector<std::vector<const SymbolBlock*>>& variables);

// Unnormalized L1 distance, in [0, 2] for probability vectors.
double variational_distance(std::span<const double> p, std::span<const double> q);
double variational_distance(const JointDist& p, const JointDist& q);

// KL divergence in bits; +infinity when support(p) is not inside support(q).
double kl_divergence(std::span<const double> p, std::span<const double> q);
double kl_divergence(const JointDist& p, const JointDist& q);

// Fraction of runs whose distance exceeds epsilon, with a 95% Wilson interval.
struct CoordinationEstimate {
    double fraction;
    double ci_low;
    double ci_high;
    int num_runs;
};

CoordinationEstimate coordination_probability(std::span<const double> distances, double epsilon);

}  // namespace coordsim
