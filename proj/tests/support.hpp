#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "kaczmarz/linalg.hpp"

namespace test {

using kaczmarz::DenseMatrix;
using kaczmarz::Vector;

// Hand-rolled generators for property tests; every draw comes from an
// explicitly seeded engine so failures reproduce.
struct Gen
{
    std::mt19937_64 rng;

    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }

    Vector vector(std::size_t n, double scale = 1.0)
    {
        Vector v(n);
        for (double& e : v)
            e = scale * normal();
        return v;
    }

    DenseMatrix matrix(std::size_t m, std::size_t n)
    {
        return DenseMatrix(m, n, vector(m * n));
    }

    DenseMatrix symmetric(std::size_t n)
    {
        Vector e(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                e[i * n + j] = e[j * n + i] = normal();
        return DenseMatrix(n, n, e);
    }
};

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

inline double max_abs_diff(const Vector& a, const Vector& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("kaczmarz-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace test
