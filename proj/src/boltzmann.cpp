#include "mscv/boltzmann.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mscv {

struct BoltzmannOperator::Fft {
    int n;
    fftw_complex* buf;
    fftw_plan fwd;
    fftw_plan bwd;
    explicit Fft(int n_) : n(n_) {
        buf = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
        fwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
};

BoltzmannOperator::BoltzmannOperator(const VelocityGrid& vg, const BoltzmannConfig& cfg) : vg_(vg), cfg_(cfg) {
    if (cfg.n_modes < 4 || cfg.n_modes > vg.n || cfg.n_modes % 2 != 0)
        throw std::invalid_argument("n_modes must be even, >= 4 and <= grid points per dimension");
    if (cfg.n_angles < 4) throw std::invalid_argument("n_angles must be >= 4");
    if (vg.n % 2 != 0) throw std::invalid_argument("velocity grid needs an even number of points");

    K_ = cfg.n_modes;
    const int h = K_ / 2 - 1;
    km_ = 2 * h + 1;
    const double L = vg.vmax;
    radius_ = 2.0 * L / (3.0 + std::numbers::sqrt2);
    const double R = radius_;
    const int nm = km_ * km_;

    auto phi = [&](double s) {
        const double x = std::numbers::pi * R * s / L;
        return std::abs(x) < 1e-12 ? 2.0 * R : 2.0 * R * std::sin(x) / x;
    };

    const int Na = cfg.n_angles;
    std::vector<double> A(static_cast<std::size_t>(Na) * nm), Ap(static_cast<std::size_t>(Na) * nm);
    for (int p = 0; p < Na; ++p) {
        const double th = std::numbers::pi * p / Na;
        const double c = std::cos(th), s = std::sin(th);
        for (int a1 = 0; a1 < km_; ++a1)
            for (int a2 = 0; a2 < km_; ++a2) {
                const double k1 = a1 - h, k2 = a2 - h;
                A[p * nm + a1 * km_ + a2] = phi(k1 * c + k2 * s);
                Ap[p * nm + a1 * km_ + a2] = phi(-k1 * s + k2 * c);
            }
    }
    auto bhat = [&](int il, int im) {
        double acc = 0;
        for (int p = 0; p < Na; ++p) acc += A[p * nm + il] * Ap[p * nm + im];
        return acc * std::numbers::pi / Na;
    };
    // Carleman kernel constant for 2D Maxwell molecules: 2*b
    const double pref = 2.0 * cfg.kernel_b;

    for (int k1 = -h; k1 <= h; ++k1)
        for (int k2 = -h; k2 <= h; ++k2) {
            if (!(k2 > 0 || (k2 == 0 && k1 >= 0))) continue;
            ModeWork mw{k1, k2, rows_.size(), 0};
            const int l1lo = std::max(-h, k1 - h), l1hi = std::min(h, k1 + h);
            const int l2lo = std::max(-h, k2 - h), l2hi = std::min(h, k2 + h);
            for (int l1 = l1lo; l1 <= l1hi; ++l1) {
                Row r{l1, l2lo, l2hi - l2lo + 1, beta_.size()};
                const int m1 = k1 - l1;
                for (int l2 = l2lo; l2 <= l2hi; ++l2) {
                    const int m2 = k2 - l2;
                    const int il = (l1 + h) * km_ + (l2 + h);
                    const int im = (m1 + h) * km_ + (m2 + h);
                    beta_.push_back(pref * (bhat(il, im) - bhat(im, im)));
                }
                rows_.push_back(r);
            }
            mw.row_end = rows_.size();
            modes_.push_back(mw);
        }

    const int n = vg.n;
    const std::size_t nn = vg.size();
    const double w = vg.dv() * vg.dv();
    proj_a_.assign(4 * nn, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double v1 = vg.node(i), v2 = vg.node(j);
            const std::size_t k = static_cast<std::size_t>(i) * n + j;
            proj_a_[0 * nn + k] = w;
            proj_a_[1 * nn + k] = w * v1;
            proj_a_[2 * nn + k] = w * v2;
            proj_a_[3 * nn + k] = w * (v1 * v1 + v2 * v2);
        }
    Eigen::Matrix4d G;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double s = 0;
            for (std::size_t k = 0; k < nn; ++k) s += proj_a_[a * nn + k] * proj_a_[b * nn + k];
            G(a, b) = s;
        }
    Eigen::Matrix4d Gi = G.inverse();
    proj_g_.resize(16);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) proj_g_[a * 4 + b] = Gi(a, b);

    fft_ = std::make_unique<Fft>(n);
}

BoltzmannOperator::~BoltzmannOperator() = default;

void BoltzmannOperator::project(double* q) const {
    const std::size_t nn = vg_.size();
    double r[4] = {0, 0, 0, 0};
    for (int a = 0; a < 4; ++a) {
        double s = 0;
        const double* row = &proj_a_[a * nn];
        for (std::size_t k = 0; k < nn; ++k) s += row[k] * q[k];
        r[a] = s;
    }
    double y[4];
    for (int a = 0; a < 4; ++a) {
        y[a] = 0;
        for (int b = 0; b < 4; ++b) y[a] += proj_g_[a * 4 + b] * r[b];
    }
    for (int a = 0; a < 4; ++a) {
        const double* row = &proj_a_[a * nn];
        for (std::size_t k = 0; k < nn; ++k) q[k] -= row[k] * y[a];
    }
}

void BoltzmannOperator::apply(const double* f, double* q) {
    const int n = vg_.n;
    const int h = K_ / 2 - 1;
    const std::size_t nn = vg_.size();
    fftw_complex* buf = fft_->buf;
    for (std::size_t k = 0; k < nn; ++k) {
        buf[k][0] = f[k];
        buf[k][1] = 0.0;
    }
    fftw_execute(fft_->fwd);

    const int nm = km_ * km_;
    thread_local std::vector<double> fr, fi, rr, ri;
    fr.resize(nm);
    fi.resize(nm);
    rr.resize(nm);
    ri.resize(nm);
    const double inv = 1.0 / static_cast<double>(nn);
    for (int a1 = 0; a1 < km_; ++a1)
        for (int a2 = 0; a2 < km_; ++a2) {
            const int k1 = a1 - h, k2 = a2 - h;
            const int j1 = (k1 + n) % n, j2 = (k2 + n) % n;
            const double sgn = ((k1 + k2) & 1) ? -inv : inv;
            const double re = sgn * buf[j1 * n + j2][0], im = sgn * buf[j1 * n + j2][1];
            fr[a1 * km_ + a2] = re;
            fi[a1 * km_ + a2] = im;
            // second index reversed: position b holds mode k2 = h - b
            rr[a1 * km_ + (2 * h - a2)] = re;
            ri[a1 * km_ + (2 * h - a2)] = im;
        }

    for (std::size_t k = 0; k < nn; ++k) buf[k][0] = buf[k][1] = 0.0;

    for (const ModeWork& mw : modes_) {
        double qre = 0, qim = 0;
        for (std::size_t r = mw.row_begin; r < mw.row_end; ++r) {
            const Row& row = rows_[r];
            const int m1 = mw.k1 - row.l1;
            const double* lr = &fr[(row.l1 + h) * km_ + (row.l2_begin + h)];
            const double* li = &fi[(row.l1 + h) * km_ + (row.l2_begin + h)];
            const int b0 = h - mw.k2 + row.l2_begin;
            const double* mr = &rr[(m1 + h) * km_ + b0];
            const double* mi = &ri[(m1 + h) * km_ + b0];
            const double* be = &beta_[row.offset];
            double sre = 0, sim = 0;
            for (int t = 0; t < row.count; ++t) {
                sre += be[t] * (lr[t] * mr[t] - li[t] * mi[t]);
                sim += be[t] * (lr[t] * mi[t] + li[t] * mr[t]);
            }
            qre += sre;
            qim += sim;
        }
        const int sgnk = ((mw.k1 + mw.k2) & 1) ? -1 : 1;
        const int j1 = (mw.k1 + n) % n, j2 = (mw.k2 + n) % n;
        buf[j1 * n + j2][0] = sgnk * qre;
        buf[j1 * n + j2][1] = sgnk * qim;
        if (mw.k1 != 0 || mw.k2 != 0) {
            const int c1 = (-mw.k1 + n) % n, c2 = (-mw.k2 + n) % n;
            buf[c1 * n + c2][0] = sgnk * qre;
            buf[c1 * n + c2][1] = -sgnk * qim;
        }
    }
    fftw_execute(fft_->bwd);
    bool finite = true;
    for (std::size_t k = 0; k < nn; ++k) {
        q[k] = buf[k][0];
        finite = finite && std::isfinite(q[k]);
    }
    if (!finite) throw std::runtime_error("collision evaluation diverged");
    if (cfg_.conservative) project(q);
}

DistributionField boltzmann_collision(const DistributionField& f, const BoltzmannConfig& cfg) {
    thread_local std::unique_ptr<BoltzmannOperator> cached;
    if (!cached || !(cached->grid() == f.vgrid) || cached->config().n_modes != cfg.n_modes ||
        cached->config().n_angles != cfg.n_angles || cached->config().kernel_b != cfg.kernel_b ||
        cached->config().conservative != cfg.conservative)
        cached = std::make_unique<BoltzmannOperator>(f.vgrid, cfg);
    DistributionField q(f.vgrid, f.xgrid);
    for (int ix = 0; ix < f.nx(); ++ix) cached->apply(f.cell(ix), q.cell(ix));
    return q;
}

}  // namespace mscv
