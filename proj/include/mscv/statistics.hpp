#pragma once

#include <cstddef>
#include <vector>

namespace mscv {

// M fields (flattened, equal length), one per sample z_k. Paired ensembles must
// carry identical z vectors.
struct SampleEnsemble {
    std::vector<std::vector<double>> members;
    std::vector<double> z;

    std::size_t size() const { return members.size(); }
    std::size_t field_size() const { return members.empty() ? 0 : members.front().size(); }
};

void check_paired(const SampleEnsemble& a, const SampleEnsemble& b);

std::vector<double> mc_mean(const SampleEnsemble& ens);
std::vector<double> sample_variance(const SampleEnsemble& ens);
std::vector<double> sample_covariance(const SampleEnsemble& a, const SampleEnsemble& b);

// Per point, the largest |value| over all members: the reference scale for
// degeneracy tests. Variances below 1e-14 scale^2 count as zero.
std::vector<double> field_scale(const SampleEnsemble& ens);
// Elementwise max into `into` (resized on first use).
void merge_scale(std::vector<double>& into, const std::vector<double>& s);
// Degeneracy threshold at point p; an empty scale means 1.
double variance_floor(const std::vector<double>& scale, std::size_t p);

// Per-point L x L covariance systems, point-major storage.
struct CovarianceSystem {
    int L = 1;
    std::size_t n_points = 0;
    std::vector<double> C;  // n_points * L * L
    std::vector<double> b;  // n_points * L
    std::vector<double> field_scale;  // per point, empty: 1
};

struct RegularizationRecord {
    std::vector<unsigned char> degenerate;  // per point: some weight forced to zero
    std::size_t n_degenerate = 0;
    std::size_t n_failed = 0;  // factorization failed even with jitter
};

struct CovSolve {
    std::vector<double> weights;  // n_points * L
    RegularizationRecord record;
};

CovSolve solve_cov_system(const CovarianceSystem& sys, bool jitter = true);

// sub[i] multiplies x[i-1] in row i+1, sup[i] multiplies x[i+1] in row i.
std::vector<double> solve_tridiagonal(const std::vector<double>& diag, const std::vector<double>& sub,
                                      const std::vector<double>& sup, const std::vector<double>& rhs);

// Streaming mean and co-moments of K paired variables at each point.
class RunningMoments {
public:
    RunningMoments(int n_vars, std::size_t n_points);

    // vars[k] points at n_points values of variable k for one sample
    void add(const std::vector<const double*>& vars);

    std::size_t count() const { return count_; }
    int n_vars() const { return k_; }
    std::size_t n_points() const { return n_; }
    std::vector<double> mean(int k) const;
    std::vector<double> covariance(int a, int b) const;  // 1/(M-1) normalised

private:
    int k_;
    std::size_t n_;
    std::size_t count_ = 0;
    std::vector<double> mean_;  // k * n
    std::vector<double> co_;    // (k*k) * n, full symmetric
};

}  // namespace mscv
