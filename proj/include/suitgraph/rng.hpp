#pragma once

#include <cstdint>
#include <random>

namespace suitgraph {

/// Seedable generator for campaigns and sampled estimators.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions are implemented here instead of using
/// <random>'s, which are allowed to differ between standard libraries.
///
/// Draw order contract (version 1):
///   uniform01  1 engine output
///   normal     2 uniform01 (Box-Muller, no caching)
///   gamma      Marsaglia-Tsang: per attempt 1 normal + 1 uniform01; shape < 1
///              adds one trailing uniform01 for the boost
///   beta       gamma(alpha) then gamma(beta)
///   index(n)   1 uniform01
class Rng {
public:
    static constexpr int kAlgorithmVersion = 1;
    static constexpr const char* kAlgorithmName = "mt19937_64/v1";

    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform01();
    /// Uniform in (0, 1]; safe to take the log of.
    double uniform_open0();
    double normal();
    /// log of a Gamma(shape, 1) draw. Working in log space keeps tiny shapes
    /// (down to 1e-6 and below) from underflowing to zero.
    double log_gamma_draw(double shape);
    /// Beta(alpha, beta) draw via two gamma draws.
    double beta(double alpha, double beta);
    /// Uniform index in [0, n).
    std::size_t index(std::size_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace suitgraph
