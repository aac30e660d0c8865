#include "mscv/random_inputs.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mscv {

SampleSet draw_uniform(const SeededStream& stream, std::size_t count) {
    if (count == 0) throw std::invalid_argument("empty sample request");
    std::seed_seq seq{static_cast<std::uint32_t>(stream.master_seed),
                      static_cast<std::uint32_t>(stream.master_seed >> 32),
                      static_cast<std::uint32_t>(stream.stream_id),
                      static_cast<std::uint32_t>(stream.stream_id >> 32)};
    std::mt19937_64 eng(seq);
    SampleSet s;
    s.kind = SampleKind::iid;
    s.values.resize(count);
    // 53 random bits -> [0,1); avoids the implementation-defined distributions
    for (auto& v : s.values) v = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return s;
}

SampleSet gauss_legendre(std::size_t count) {
    if (count < 1 || count > 64) throw std::invalid_argument("unsupported quadrature order");
    const std::size_t n = count;
    SampleSet s;
    s.kind = SampleKind::quadrature;
    s.values.resize(n);
    s.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1,1] -> [0,1], ascending order
        s.values[i] = 0.5 * (1.0 - x);
        s.values[n - 1 - i] = 0.5 * (1.0 + x);
        s.weights[i] = 0.5 * w;
        s.weights[n - 1 - i] = 0.5 * w;
    }
    if (n % 2 == 1) s.values[n / 2] = 0.5;
    return s;
}

std::uint64_t stream_label(std::uint32_t level, std::uint32_t repetition) {
    return (static_cast<std::uint64_t>(level) << 32) | repetition;
}

}  // namespace mscv
