#include "plate/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "plate/errors.hpp"

namespace plate {

namespace {
// FFTW's planner is not thread-safe; creation/destruction is serialized
// globally.  Execution uses the per-grid mutex below.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct SpectralGrid::Fftw {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    mutable std::mutex exec;

    ~Fftw() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (in) fftw_free(in);
        if (out) fftw_free(out);
    }
};

SpectralGrid::SpectralGrid(int n, int N, double L) : n_(n), N_(N), L_(L) {
    if (n != 1 && n != 2)
        throw ConfigError("grid: dimension must be 1 or 2, got " + std::to_string(n));
    if (N < 8 || N % 2 != 0)
        throw ConfigError("grid: N must be even and >= 8, got " + std::to_string(N));
    if (!(L > 0.0))
        throw ConfigError("grid: L must be positive, got " + std::to_string(L));

    size_ = 1;
    for (int a = 0; a < n_; ++a) size_ *= static_cast<std::size_t>(N_);
    dx_ = 2.0 * L_ / N_;
    dxi_ = std::numbers::pi / L_;

    k_axis_.resize(N_);
    for (int i = 0; i < N_; ++i) {
        int j = (i < N_ / 2) ? i : i - N_;
        k_axis_[i] = dxi_ * j;
    }

    xi_sq_.resize(size_);
    sign_.resize(size_);
    max_xi_sq_ = 0.0;
    for (std::size_t flat = 0; flat < size_; ++flat) {
        std::size_t rem = flat;
        double ksq = 0.0;
        long parity = 0;
        for (int a = n_ - 1; a >= 0; --a) {
            std::size_t i = rem % N_;
            rem /= N_;
            ksq += k_axis_[i] * k_axis_[i];
            parity += static_cast<long>(i);
        }
        xi_sq_[flat] = ksq;
        sign_[flat] = (parity % 2 == 0) ? 1.0 : -1.0;
        if (ksq > max_xi_sq_) max_xi_sq_ = ksq;
    }

    fftw_ = std::make_unique<Fftw>();
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_->in = fftw_alloc_complex(size_);
        fftw_->out = fftw_alloc_complex(size_);
        if (!fftw_->in || !fftw_->out)
            throw NumericalError("grid: fftw allocation failed");
        // FFTW_ESTIMATE keeps plan selection independent of runtime timing,
        // which the byte-level determinism guarantee relies on.
        if (n_ == 1) {
            fftw_->fwd = fftw_plan_dft_1d(N_, fftw_->in, fftw_->out,
                                          FFTW_FORWARD, FFTW_ESTIMATE);
            fftw_->bwd = fftw_plan_dft_1d(N_, fftw_->in, fftw_->out,
                                          FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            fftw_->fwd = fftw_plan_dft_2d(N_, N_, fftw_->in, fftw_->out,
                                          FFTW_FORWARD, FFTW_ESTIMATE);
            fftw_->bwd = fftw_plan_dft_2d(N_, N_, fftw_->in, fftw_->out,
                                          FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        if (!fftw_->fwd || !fftw_->bwd)
            throw NumericalError("grid: fftw planning failed");
    }
}

SpectralGrid::~SpectralGrid() = default;

double SpectralGrid::coord(std::size_t flat, int axis) const {
    std::size_t stride = 1;
    for (int a = n_ - 1; a > axis; --a) stride *= static_cast<std::size_t>(N_);
    std::size_t i = (flat / stride) % N_;
    return -L_ + dx_ * static_cast<double>(i);
}

Field SpectralGrid::make_field() const {
    Field f;
    f.grid = this;
    f.v.assign(size_, 0.0);
    return f;
}

Spectrum SpectralGrid::make_spectrum() const {
    Spectrum s;
    s.grid = this;
    s.c.assign(size_, {0.0, 0.0});
    return s;
}

Spectrum SpectralGrid::forward(const Field& f) const {
    if (f.grid != this || f.v.size() != size_)
        throw ConfigError("grid: forward() called with a field from another grid");
    Spectrum out = make_spectrum();
    const double w = dx_ / std::sqrt(2.0 * std::numbers::pi);
    double weight = 1.0;
    for (int a = 0; a < n_; ++a) weight *= w;

    std::lock_guard<std::mutex> lock(fftw_->exec);
    for (std::size_t i = 0; i < size_; ++i) {
        fftw_->in[i][0] = f.v[i];
        fftw_->in[i][1] = 0.0;
    }
    fftw_execute(fftw_->fwd);
    for (std::size_t i = 0; i < size_; ++i) {
        out.c[i] = std::complex<double>(fftw_->out[i][0], fftw_->out[i][1]) *
                   (weight * sign_[i]);
    }
    return out;
}

Field SpectralGrid::inverse(const Spectrum& s, double* imag_residual) const {
    if (s.grid != this || s.c.size() != size_)
        throw ConfigError("grid: inverse() called with a spectrum from another grid");
    Field out = make_field();
    const double w = dxi_ / std::sqrt(2.0 * std::numbers::pi);
    double weight = 1.0;
    for (int a = 0; a < n_; ++a) weight *= w;

    double max_im = 0.0, max_re = 0.0;
    {
        std::lock_guard<std::mutex> lock(fftw_->exec);
        for (std::size_t i = 0; i < size_; ++i) {
            fftw_->in[i][0] = s.c[i].real() * sign_[i];
            fftw_->in[i][1] = s.c[i].imag() * sign_[i];
        }
        fftw_execute(fftw_->bwd);
        for (std::size_t i = 0; i < size_; ++i) {
            double re = fftw_->out[i][0] * weight;
            double im = fftw_->out[i][1] * weight;
            out.v[i] = re;
            max_re = std::max(max_re, std::abs(re));
            max_im = std::max(max_im, std::abs(im));
        }
    }
    if (imag_residual) {
        *imag_residual = max_im / std::max(max_re, 1e-300);
    }
    return out;
}

double SpectralGrid::boundary_band_ratio(const Spectrum& s) const {
    if (s.grid != this) throw ConfigError("grid: spectrum from another grid");
    double global = 0.0, band = 0.0;
    // Outermost layer: 1-d index in {N/2-1, N/2, N/2+1} on any axis
    // (largest resolved |k| and its neighbors).
    auto outer = [this](std::size_t i1d) {
        auto half = static_cast<std::size_t>(N_ / 2);
        return i1d + 1 >= half && i1d <= half + 1;
    };
    for (std::size_t flat = 0; flat < size_; ++flat) {
        double mag = std::abs(s.c[flat]);
        global = std::max(global, mag);
        std::size_t rem = flat;
        bool on_boundary = false;
        for (int a = 0; a < n_; ++a) {
            if (outer(rem % N_)) on_boundary = true;
            rem /= N_;
        }
        if (on_boundary) band = std::max(band, mag);
    }
    return band / std::max(global, 1e-300);
}

std::size_t SpectralGrid::conjugate_index(std::size_t flat) const {
    std::size_t out = 0;
    std::size_t stride = 1;
    std::size_t rem = flat;
    for (int a = 0; a < n_; ++a) {
        std::size_t i = rem % N_;
        rem /= N_;
        std::size_t j = (i == 0) ? 0 : static_cast<std::size_t>(N_) - i;
        out += j * stride;
        stride *= static_cast<std::size_t>(N_);
    }
    return out;
}

double SpectralGrid::hermitian_defect(const Spectrum& s) const {
    if (s.grid != this) throw ConfigError("grid: spectrum from another grid");
    double global = 0.0, defect = 0.0;
    for (std::size_t flat = 0; flat < size_; ++flat)
        global = std::max(global, std::abs(s.c[flat]));
    for (std::size_t flat = 0; flat < size_; ++flat) {
        std::size_t conj = conjugate_index(flat);
        if (conj < flat) continue;
        defect = std::max(defect, std::abs(s.c[flat] - std::conj(s.c[conj])));
    }
    return defect / std::max(global, 1e-300);
}

SpectralGrid make_grid(int n, int N, double L) { return SpectralGrid(n, N, L); }

} // namespace plate
