#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "mscv/phase_space.hpp"

namespace mscv {

// 2D Maxwell molecules, sigma-kernel B = kernel_b (1/(2 pi) gives loss frequency rho).
struct BoltzmannConfig {
    int n_modes = 32;   // Fourier modes per dimension, <= grid points per dimension
    int n_angles = 8;   // N_a
    double kernel_b = 0.15915494309189535;
    bool conservative = true;  // project output onto zero mass/momentum/energy
};

// Fourier-Galerkin collision operator on a periodized velocity box, using the
// Carleman-type angular decomposition with a precomputed real kernel table and
// direct convolution sums over the retained modes.
class BoltzmannOperator {
public:
    BoltzmannOperator(const VelocityGrid& vg, const BoltzmannConfig& cfg);
    ~BoltzmannOperator();
    BoltzmannOperator(const BoltzmannOperator&) = delete;
    BoltzmannOperator& operator=(const BoltzmannOperator&) = delete;

    // Q(f,f) at the grid nodes of one velocity cell. Not reentrant: each thread owns an operator.
    void apply(const double* f, double* q);

    const VelocityGrid& grid() const { return vg_; }
    const BoltzmannConfig& config() const { return cfg_; }
    double truncation_radius() const { return radius_; }

private:
    void project(double* q) const;

    VelocityGrid vg_;
    BoltzmannConfig cfg_;
    int K_ = 0;  // retained modes per dimension: k in [-K/2+1 .. K/2-1] -> K-1 values
    int km_ = 0;
    double radius_ = 0;
    // For each output mode (half plane), rows of kernel values over valid l.
    struct Row {
        int l1;
        int l2_begin;
        int count;
        std::size_t offset;  // into beta_
    };
    struct ModeWork {
        int k1, k2;
        std::size_t row_begin, row_end;
    };
    std::vector<double> beta_;
    std::vector<Row> rows_;
    std::vector<ModeWork> modes_;
    std::vector<double> proj_a_;  // 4 x n^2 constraint rows (times dv^2)
    std::vector<double> proj_g_;  // 4 x 4 inverse Gram matrix
    struct Fft;
    std::unique_ptr<Fft> fft_;
};

// Free-function form; builds (and caches per thread) an operator for the grid/config.
DistributionField boltzmann_collision(const DistributionField& f, const BoltzmannConfig& cfg);

}  // namespace mscv
