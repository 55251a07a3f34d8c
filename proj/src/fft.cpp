#include "frameforge/fft.hpp"

#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace frameforge {

namespace {
// FFTW plan creation is not thread-safe; execution of a created plan is.
std::mutex fftw_mutex;
}  // namespace

GridFunction dft(const Box& box, const GridFunction& f, int sign) {
    if (static_cast<long>(f.size()) != box.total_points())
        throw std::invalid_argument("dft: grid size mismatch");
    GridFunction out(f.size());
    auto* in_ptr = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(f.data()));
    auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        const int n = box.points_per_axis();
        if (box.dim() == 1)
            plan = fftw_plan_dft_1d(n, in_ptr, out_ptr,
                                    sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
        else
            plan = fftw_plan_dft_2d(n, n, in_ptr, out_ptr,
                                    sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(plan);
    }
    return out;
}

GridFunction fourier_hat(const Box& box, const GridFunction& f) {
    return dft(box, f, -1) * box.cell_measure();
}

GridFunction fourier_hat_inverse(const Box& box, const GridFunction& fhat) {
    double scale = 1.0;
    for (int a = 0; a < box.dim(); ++a) scale /= box.side();
    return dft(box, fhat, +1) * scale;
}

}  // namespace frameforge
