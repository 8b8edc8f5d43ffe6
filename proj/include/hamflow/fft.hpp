#ifndef HAMFLOW_FFT_HPP
#define HAMFLOW_FFT_HPP

#include <complex>
#include <vector>

#include "hamflow/types.hpp"

namespace hamflow::fft {

using Complex = std::complex<Real>;

/// In-place complex DFT, X_k = sum_j x_j exp(-2*pi*i*j*k/n) (forward).
/// The inverse applies the conjugate kernel and divides by n, so
/// fft(fft(x), inverse=true) == x to round-off. Radix-2 for powers of two,
/// Bluestein's chirp-z otherwise, so any length works.
void fft(std::vector<Complex>& a, bool inverse);

/// Unnormalized DST-I: S_l = sum_{q=1}^{n} x_q sin(pi*q*l/(n+1)), l = 1..n,
/// with x and the result 0-based. Self-transpose: dst1(dst1(x)) = (n+1)/2 * x.
Vector dst1(const VectorRef& x);

/// Unnormalized DCT-I with half end weights on a grid of n+1 points:
/// C_l = x_0/2 + sum_{q=1}^{n-1} x_q cos(pi*q*l/n) + (-1)^l x_n / 2.
Vector dct1(const VectorRef& x);

} // namespace hamflow::fft

#endif
