#include "mscv/statistics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mscv {

void check_paired(const SampleEnsemble& a, const SampleEnsemble& b) {
    if (a.size() != b.size() || a.z != b.z) throw std::invalid_argument("sample sets differ");
    if (a.field_size() != b.field_size()) throw std::invalid_argument("grid mismatch");
}

std::vector<double> mc_mean(const SampleEnsemble& ens) {
    if (ens.size() == 0) throw std::invalid_argument("empty ensemble");
    std::vector<double> m(ens.field_size(), 0.0);
    for (const auto& f : ens.members) {
        if (f.size() != m.size()) throw std::invalid_argument("grid mismatch");
        for (std::size_t k = 0; k < m.size(); ++k) m[k] += f[k];
    }
    const double inv = 1.0 / static_cast<double>(ens.size());
    for (double& v : m) v *= inv;
    return m;
}

std::vector<double> sample_covariance(const SampleEnsemble& a, const SampleEnsemble& b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("insufficient samples");
    check_paired(a, b);
    const auto ma = mc_mean(a), mb = mc_mean(b);
    std::vector<double> c(ma.size(), 0.0);
    for (std::size_t s = 0; s < a.size(); ++s) {
        const auto& fa = a.members[s];
        const auto& fb = b.members[s];
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += (fa[k] - ma[k]) * (fb[k] - mb[k]);
    }
    const double inv = 1.0 / static_cast<double>(a.size() - 1);
    for (double& v : c) v *= inv;
    return c;
}

std::vector<double> sample_variance(const SampleEnsemble& ens) { return sample_covariance(ens, ens); }

std::vector<double> field_scale(const SampleEnsemble& ens) {
    std::vector<double> s(ens.field_size(), 0.0);
    for (const auto& f : ens.members)
        for (std::size_t p = 0; p < s.size(); ++p) s[p] = std::max(s[p], std::abs(f[p]));
    return s;
}

void merge_scale(std::vector<double>& into, const std::vector<double>& s) {
    if (into.empty()) into.assign(s.size(), 0.0);
    if (into.size() != s.size()) throw std::invalid_argument("field size mismatch");
    for (std::size_t p = 0; p < s.size(); ++p) into[p] = std::max(into[p], s[p]);
}

double variance_floor(const std::vector<double>& scale, std::size_t p) {
    const double s = scale.empty() ? 1.0 : scale[p];
    return 1e-14 * s * s;
}

CovSolve solve_cov_system(const CovarianceSystem& sys, bool jitter) {
    const int L = sys.L;
    if (L < 1) throw std::invalid_argument("empty covariance system");
    const std::size_t n = sys.n_points;
    if (sys.C.size() != n * L * L || sys.b.size() != n * L) throw std::invalid_argument("covariance system size mismatch");
    CovSolve out;
    out.weights.assign(n * L, 0.0);
    out.record.degenerate.assign(n, 0);
    if (!sys.field_scale.empty() && sys.field_scale.size() != n) throw std::invalid_argument("covariance system size mismatch");

    std::vector<int> keep;
    keep.reserve(L);
    for (std::size_t p = 0; p < n; ++p) {
        const double* C = &sys.C[p * L * L];
        const double* b = &sys.b[p * L];
        keep.clear();
        const double var_floor = variance_floor(sys.field_scale, p);
        for (int h = 0; h < L; ++h)
            if (C[h * L + h] > var_floor) keep.push_back(h);
        if (static_cast<int>(keep.size()) < L) {
            out.record.degenerate[p] = 1;
            ++out.record.n_degenerate;
        }
        const int r = static_cast<int>(keep.size());
        if (r == 0) continue;
        Eigen::MatrixXd A(r, r);
        Eigen::VectorXd rhs(r);
        double trace = 0;
        for (int i = 0; i < r; ++i) {
            rhs(i) = b[keep[i]];
            for (int j = 0; j < r; ++j) A(i, j) = C[keep[i] * L + keep[j]];
            trace += A(i, i);
        }
        if (jitter) A.diagonal().array() += 1e-12 * trace / r;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
        Eigen::VectorXd x;
        if (ok) {
            x = ldlt.solve(rhs);
            ok = x.allFinite();
        }
        if (!ok) {
            if (!out.record.degenerate[p]) {
                out.record.degenerate[p] = 1;
                ++out.record.n_degenerate;
            }
            ++out.record.n_failed;
            continue;
        }
        for (int i = 0; i < r; ++i) out.weights[p * L + keep[i]] = x(i);
    }
    return out;
}

std::vector<double> solve_tridiagonal(const std::vector<double>& diag, const std::vector<double>& sub,
                                      const std::vector<double>& sup, const std::vector<double>& rhs) {
    const std::size_t L = diag.size();
    if (L == 0) throw std::invalid_argument("empty tridiagonal system");
    if (rhs.size() != L || sub.size() + 1 != L || sup.size() + 1 != L)
        throw std::invalid_argument("tridiagonal size mismatch");
    std::vector<double> c(L, 0.0), d(L, 0.0), x(L, 0.0);
    double piv = diag[0];
    if (piv == 0.0) throw std::runtime_error("singular tridiagonal system");
    c[0] = L > 1 ? sup[0] / piv : 0.0;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < L; ++i) {
        piv = diag[i] - sub[i - 1] * c[i - 1];
        if (piv == 0.0 || !std::isfinite(piv)) throw std::runtime_error("singular tridiagonal system");
        c[i] = i + 1 < L ? sup[i] / piv : 0.0;
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / piv;
    }
    x[L - 1] = d[L - 1];
    for (std::size_t i = L - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];

    double rmax = 0, bmax = 0;
    for (std::size_t i = 0; i < L; ++i) {
        double r = diag[i] * x[i] - rhs[i];
        if (i > 0) r += sub[i - 1] * x[i - 1];
        if (i + 1 < L) r += sup[i] * x[i + 1];
        rmax = std::max(rmax, std::abs(r));
        bmax = std::max(bmax, std::abs(rhs[i]));
    }
    if (!(rmax <= 1e-10 * bmax) && bmax > 0) throw std::runtime_error("singular tridiagonal system");
    return x;
}

RunningMoments::RunningMoments(int n_vars, std::size_t n_points)
    : k_(n_vars), n_(n_points), mean_(static_cast<std::size_t>(n_vars) * n_points, 0.0),
      co_(static_cast<std::size_t>(n_vars) * n_vars * n_points, 0.0) {
    if (n_vars < 1) throw std::invalid_argument("RunningMoments needs at least one variable");
}

void RunningMoments::add(const std::vector<const double*>& vars) {
    if (static_cast<int>(vars.size()) != k_) throw std::invalid_argument("variable count mismatch");
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    std::vector<double> dold(k_), dnew(k_);
    for (std::size_t p = 0; p < n_; ++p) {
        for (int a = 0; a < k_; ++a) {
            double& m = mean_[a * n_ + p];
            dold[a] = vars[a][p] - m;
            m += dold[a] * inv;
            dnew[a] = vars[a][p] - m;
        }
        // Welford co-moment update: C_ab += (x_a - mean_a_old)(x_b - mean_b_new)
        for (int a = 0; a < k_; ++a)
            for (int b = a; b < k_; ++b) {
                const double inc = 0.5 * (dold[a] * dnew[b] + dold[b] * dnew[a]);
                co_[(a * k_ + b) * n_ + p] += inc;
                if (b != a) co_[(b * k_ + a) * n_ + p] += inc;
            }
    }
}

std::vector<double> RunningMoments::mean(int k) const {
    if (count_ == 0) throw std::invalid_argument("empty ensemble");
    return {mean_.begin() + k * n_, mean_.begin() + (k + 1) * n_};
}

std::vector<double> RunningMoments::covariance(int a, int b) const {
    if (count_ < 2) throw std::invalid_argument("insufficient samples");
    std::vector<double> c(co_.begin() + (a * k_ + b) * n_, co_.begin() + (a * k_ + b + 1) * n_);
    const double inv = 1.0 / static_cast<double>(count_ - 1);
    for (double& v : c) v *= inv;
    return c;
}

}  // namespace mscv
