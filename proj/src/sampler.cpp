#include "kaczmarz/sampler.hpp"

#include <algorithm>
#include <string>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

std::vector<double> row_probabilities(const DenseMatrix& A)
{
    std::vector<double> p(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
    {
        if (A.row_norm_sq(i) <= 0.0)
            throw InvalidInput("row " + std::to_string(i) + " is zero; sampling probability undefined");
        p[i] = A.row_norm_sq(i) / A.frobenius_sq();
    }
    return p;
}

RowSampler::RowSampler(const DenseMatrix& A, std::uint64_t seed)
    : probabilities_(row_probabilities(A)), cumulative_(probabilities_.size()), rng_(seed)
{
    double running = 0.0;
    for (std::size_t i = 0; i < probabilities_.size(); ++i)
    {
        running += probabilities_[i];
        cumulative_[i] = running;
    }
}

std::size_t RowSampler::sample()
{
    const double u = uniform01(rng_) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto index = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(index, cumulative_.size() - 1);
}

}  // namespace kaczmarz
