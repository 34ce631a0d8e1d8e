#pragma once

// Thin RAII layer over FFTW for the two transforms the library needs.

#include <complex>
#include <vector>

namespace pseudorain::fft {

using Complex = std::complex<double>;

/// Real-to-half-complex 2-D transform of a row-major h x w array.
/// Returns h x (w/2 + 1) coefficients.
std::vector<Complex> forward_real(const std::vector<double>& data, int h, int w);

/// Inverse of forward_real, normalised by 1/(h*w).
std::vector<double> inverse_real(const std::vector<Complex>& spectrum, int h, int w);

/// Full complex 2-D DFT of a real h x w array (all h*w bins, unnormalised).
std::vector<Complex> forward_full(const std::vector<double>& data, int h, int w);

}  // namespace pseudorain::fft
