#include "suitgraph/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace suitgraph {

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform_open0() { return 1.0 - uniform01(); }

double Rng::normal() {
    const double u1 = uniform_open0();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::log_gamma_draw(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
    // Gamma(a) = Gamma(a + 1) * U^(1/a) for a < 1.
    const bool boost = shape < 1.0;
    const double a = boost ? shape + 1.0 : shape;
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    double log_draw = 0.0;
    for (;;) {
        const double x = normal();
        double v = 1.0 + c * x;
        const double u = uniform_open0();
        if (v <= 0.0) continue;
        v = v * v * v;
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
            log_draw = std::log(d) + std::log(v);
            break;
        }
    }
    if (boost) log_draw += std::log(uniform_open0()) / shape;
    return log_draw;
}

double Rng::beta(double alpha, double beta) {
    const double lx = log_gamma_draw(alpha);
    const double ly = log_gamma_draw(beta);
    // x / (x + y) = 1 / (1 + exp(ly - lx))
    return 1.0 / (1.0 + std::exp(ly - lx));
}

std::size_t Rng::index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("index over empty range");
    auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
}

}  // namespace suitgraph
