#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mscv {

// (master_seed, stream_id) fully determines the sequence; members of an
// ensemble each get their own stream_id so they can be drawn in any order.
struct SeededStream {
    std::uint64_t master_seed = 42;
    std::uint64_t stream_id = 0;
};

enum class SampleKind { iid, quadrature };

struct SampleSet {
    std::vector<double> values;
    SampleKind kind = SampleKind::iid;
    std::vector<double> weights;  // empty for iid

    std::size_t size() const { return values.size(); }
};

SampleSet draw_uniform(const SeededStream& stream, std::size_t count);

// Gauss-Legendre rule on [0,1], weights summing to one. 1 <= count <= 64.
SampleSet gauss_legendre(std::size_t count);

// Stream ids used by the experiments: level tag in the high bits, repetition below.
std::uint64_t stream_label(std::uint32_t level, std::uint32_t repetition);

}  // namespace mscv
