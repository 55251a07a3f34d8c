#pragma once

#include "frameforge/grid.hpp"

namespace frameforge {

/// Unnormalized DFT of a flat grid vector over the box (1-d or 2-d, row-major
/// with axis 0 slowest). sign = -1 forward, +1 backward.
GridFunction dft(const Box& box, const GridFunction& f, int sign);

/// Continuous-convention Fourier transform on the grid:
/// f_hat(w_m) = sum_x f(x) e^{-2 pi i w x} h^d, frequencies m / L per axis.
GridFunction fourier_hat(const Box& box, const GridFunction& f);

/// Inverse of fourier_hat: f(x) = sum_w f_hat(w) e^{2 pi i w x} L^{-d}.
GridFunction fourier_hat_inverse(const Box& box, const GridFunction& fhat);

}  // namespace frameforge
