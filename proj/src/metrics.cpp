#include "coordsim/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coordsim {

EmpiricalType::EmpiricalType(std::vector<std::string> roles, std::vector<int> dims)
    : roles_(std::move(roles)), dims_(std::move(dims)) {
    if (roles_.size() != dims_.size() || roles_.empty())
        throw std::invalid_argument("EmpiricalType: roles/dims mismatch");
    long cells = 1;
    for (int d : dims_) {
        if (d <= 0) throw std::invalid_argument("EmpiricalType: dims must be positive");
        cells *= d;
    }
    counts_.assign(cells, 0);
}

void EmpiricalType::add(std::span<const int> symbols) {
    if (symbols.size() != dims_.size()) throw std::invalid_argument("EmpiricalType: wrong arity");
    long flat = 0;
    for (size_t i = 0; i < symbols.size(); ++i) {
        if (symbols[i] < 0 || symbols[i] >= dims_[i])
            throw std::out_of_range("EmpiricalType: symbol out of range");
        flat = flat * dims_[i] + symbols[i];
    }
    ++counts_[flat];
    ++total_;
}

void EmpiricalType::merge(const EmpiricalType& other) {
    if (other.roles_ != roles_ || other.dims_ != dims_)
        throw std::invalid_argument("EmpiricalType: merge shape mismatch");
    for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    total_ += other.total_;
}

std::vector<double> EmpiricalType::normalized() const {
    if (total_ == 0) throw std::logic_error("EmpiricalType: empty histogram");
    std::vector<double> p(counts_.size());
    for (size_t i = 0; i < counts_.size(); ++i)
        p[i] = static_cast<double>(counts_[i]) / static_cast<double>(total_);
    return p;
}

JointDist EmpiricalType::distribution() const { return JointDist(roles_, dims_, normalized()); }

EmpiricalType type_of(std::span<const std::string> roles, std::span<const int> dims,
                      const std::vector<std::vector<const SymbolBlock*>>& variables) {
    if (variables.size() != roles.size())
        throw std::invalid_argument("type_of: one block list per variable required");
    EmpiricalType type({roles.begin(), roles.end()}, {dims.begin(), dims.end()});
    const size_t num_blocks = variables.empty() ? 0 : variables[0].size();
    for (const auto& blocks : variables)
        if (blocks.size() != num_blocks)
            throw std::invalid_argument("type_of: variables cover different block counts");
    std::vector<int> tuple(roles.size());
    for (size_t b = 0; b < num_blocks; ++b) {
        const int n = variables[0][b]->n();
        for (const auto& blocks : variables)
            if (blocks[b]->n() != n) throw std::invalid_argument("type_of: misaligned block lengths");
        for (int t = 0; t < n; ++t) {
            for (size_t v = 0; v < variables.size(); ++v) tuple[v] = (*variables[v][b])[t];
            type.add(tuple);
        }
    }
    return type;
}

double variational_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("variational_distance: alphabet mismatch");
    double v = 0.0;
    for (size_t i = 0; i < p.size(); ++i) v += std::abs(p[i] - q[i]);
    return v;
}

double variational_distance(const JointDist& p, const JointDist& q) {
    if (p.dims() != q.dims()) throw std::invalid_argument("variational_distance: alphabet mismatch");
    return variational_distance(std::span<const double>(p.probs()), std::span<const double>(q.probs()));
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: alphabet mismatch");
    double d = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
        d += p[i] * std::log2(p[i] / q[i]);
    }
    return d < 0.0 ? 0.0 : d;  // rounding guard
}

double kl_divergence(const JointDist& p, const JointDist& q) {
    if (p.dims() != q.dims()) throw std::invalid_argument("kl_divergence: alphabet mismatch");
    return kl_divergence(std::span<const double>(p.probs()), std::span<const double>(q.probs()));
}

CoordinationEstimate coordination_probability(std::span<const double> distances, double epsilon) {
    if (distances.empty()) throw std::invalid_argument("coordination_probability: no runs");
    const int n = static_cast<int>(distances.size());
    int exceed = 0;
    for (double v : distances)
        if (v > epsilon) ++exceed;
    const double phat = static_cast<double>(exceed) / n;
    // Wilson score interval at 95%.
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double spread = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    CoordinationEstimate e{};
    e.fraction = phat;
    e.ci_low = center - spread < 0.0 ? 0.0 : center - spread;
    e.ci_high = center + spread > 1.0 ? 1.0 : center + spread;
    e.num_runs = n;
    return e;
}

}  // namespace coordsim
