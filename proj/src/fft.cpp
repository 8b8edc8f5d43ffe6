#include "hamflow/fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace hamflow::fft {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 Cooley-Tukey, n a power of two.
void fft_pow2(std::vector<Complex>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const Real ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<Real>(len);
        const Complex wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                Complex u = a[i + j];
                Complex v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Bluestein chirp-z for arbitrary n, built on power-of-two FFTs.
// Uses j^2 mod 2n when forming the chirp to keep the angle argument small.
void fft_bluestein(std::vector<Complex>& a) {
    const std::size_t n = a.size();
    const std::size_t mod = 2 * n;
    std::vector<Complex> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t j2 = (j * j) % mod;
        const Real ang = -kPi * static_cast<Real>(j2) / static_cast<Real>(n);
        chirp[j] = Complex(std::cos(ang), std::sin(ang));
    }
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<Complex> u(m, Complex(0, 0)), v(m, Complex(0, 0));
    for (std::size_t j = 0; j < n; ++j) u[j] = a[j] * chirp[j];
    v[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < n; ++j) {
        v[j] = std::conj(chirp[j]);
        v[m - j] = std::conj(chirp[j]);
    }
    fft_pow2(u, false);
    fft_pow2(v, false);
    for (std::size_t j = 0; j < m; ++j) u[j] *= v[j];
    fft_pow2(u, true);
    const Real scale = 1.0 / static_cast<Real>(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = u[k] * scale * chirp[k];
}

} // namespace

void fft(std::vector<Complex>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (inverse) {
        for (auto& z : a) z = std::conj(z);
        fft(a, false);
        const Real scale = 1.0 / static_cast<Real>(n);
        for (auto& z : a) z = std::conj(z) * scale;
        return;
    }
    if (is_pow2(n)) {
        fft_pow2(a, false);
    } else {
        fft_bluestein(a);
    }
}

Vector dst1(const VectorRef& x) {
    const Index n = x.size();
    const Index K = n + 1;
    std::vector<Complex> v(2 * K, Complex(0, 0));
    for (Index q = 1; q <= n; ++q) {
        v[static_cast<std::size_t>(q)] = Complex(x[q - 1], 0);
        v[static_cast<std::size_t>(2 * K - q)] = Complex(-x[q - 1], 0);
    }
    fft(v, false);
    Vector s(n);
    for (Index l = 1; l <= n; ++l) s[l - 1] = -0.5 * v[static_cast<std::size_t>(l)].imag();
    return s;
}

Vector dct1(const VectorRef& x) {
    const Index npts = x.size();
    const Index n = npts - 1; // segments
    if (n == 0) {
        Vector c(1);
        c[0] = x[0]; // single point: C_0 = x_0 (half weights at both "ends" coincide)
        return c;
    }
    std::vector<Complex> v(2 * n, Complex(0, 0));
    for (Index q = 0; q <= n; ++q) v[static_cast<std::size_t>(q)] = Complex(x[q], 0);
    for (Index q = 1; q < n; ++q) v[static_cast<std::size_t>(2 * n - q)] = Complex(x[q], 0);
    fft(v, false);
    Vector c(npts);
    for (Index l = 0; l <= n; ++l) c[l] = 0.5 * v[static_cast<std::size_t>(l)].real();
    return c;
}

} // namespace hamflow::fft
