#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace plate {

class SpectralGrid;

// Real-valued sample values on the grid, row-major over the n axes.
struct Field {
    const SpectralGrid* grid = nullptr;
    std::vector<double> v;
};

// Complex Fourier coefficients, same layout and FFTW frequency ordering.
struct Spectrum {
    const SpectralGrid* grid = nullptr;
    std::vector<std::complex<double>> c;
};

// Uniform periodic grid on the torus [-L, L]^n with N points per axis.
//
// Sample points:     x_m = -L + m * dx,  dx = 2L/N,  m = 0..N-1.
// Frequencies:       k_j = pi * j / L in FFTW order (index i maps to
//                    j = i for i < N/2 and j = i - N otherwise), so the
//                    frequency spacing is dxi = pi / L and the largest
//                    resolved |k| is pi*(N/2)/L.
// Transform pair:    fhat = (2pi)^{-n/2} dx^n  * sum_m f(x_m) e^{-i k.x_m}
//                    f    = (2pi)^{-n/2} dxi^n * sum_j fhat_j e^{+i k_j.x}
// which makes the pair unitary up to the lattice Parseval identity
//                    dx^n sum |f|^2 = dxi^n sum |fhat|^2.
//
// The e^{-i k.x} factors for the offset origin x_0 = -L reduce to the
// parity sign (-1)^{i0+i1+...} per sample, precomputed in sign_.
//
// FFTW plans are created with FFTW_ESTIMATE so planning is deterministic,
// and plan execution is serialized through a per-grid mutex (new-array
// execute on shared internal buffers).  Grids are not copyable; share one
// per worker thread.
class SpectralGrid {
public:
    SpectralGrid(int n, int N, double L);
    ~SpectralGrid();

    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    int dim() const noexcept { return n_; }
    int points_per_axis() const noexcept { return N_; }
    double half_length() const noexcept { return L_; }
    std::size_t size() const noexcept { return size_; }
    double dx() const noexcept { return dx_; }
    double dxi() const noexcept { return dxi_; }

    // |k|^2 at each flat spectral index (exactly one zero entry, at index 0).
    const std::vector<double>& xi_sq() const noexcept { return xi_sq_; }
    double max_xi_sq() const noexcept { return max_xi_sq_; }

    // x coordinate of flat index m along the given axis.
    double coord(std::size_t flat, int axis) const;

    Field make_field() const;
    Spectrum make_spectrum() const;

    Spectrum forward(const Field& f) const;

    // Inverse transform of a (nominally Hermitian) spectrum.  The imaginary
    // part is discarded; if imag_residual is non-null it receives
    // max|Im| / max(|result|, tiny) so callers can detect symmetry loss.
    Field inverse(const Spectrum& s, double* imag_residual = nullptr) const;

    // Relative magnitude of the outermost spectral shell: max |fhat| over
    // indices with any axis at the Nyquist-adjacent layer, divided by the
    // global max |fhat|.  A wrap-around / under-resolution monitor.
    double boundary_band_ratio(const Spectrum& s) const;

    // max over canonical conjugate pairs of |fhat(k) - conj(fhat(-k))|,
    // relative to max |fhat|.
    double hermitian_defect(const Spectrum& s) const;

private:
    int n_;
    int N_;
    double L_;
    double dx_;
    double dxi_;
    std::size_t size_;
    std::vector<double> k_axis_;   // frequency value per 1-d index
    std::vector<double> xi_sq_;
    double max_xi_sq_;
    std::vector<double> sign_;     // (-1)^{sum of per-axis indices}

    struct Fftw;                   // owns plans, buffers, and the mutex
    std::unique_ptr<Fftw> fftw_;

    std::size_t conjugate_index(std::size_t flat) const;
};

SpectralGrid make_grid(int n, int N, double L);

} // namespace plate
