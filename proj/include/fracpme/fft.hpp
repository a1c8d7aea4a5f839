#pragma once

// Thin RAII layer over FFTW's 1D real transforms.
//
// Plans are created once per transform size with FFTW_ESTIMATE | FFTW_UNALIGNED
// so they can be executed on caller-owned buffers via the new-array interface,
// which is thread-safe. Plan creation itself is serialized by a global mutex
// (FFTW planner is not reentrant).

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace fracpme {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class RealFft {
  public:
    explicit RealFft(int size) : m_(size) {
        std::vector<double> re(m_);
        std::vector<std::complex<double>> cx(m_ / 2 + 1);
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_r2c_1d(m_, re.data(),
                                    reinterpret_cast<fftw_complex*>(cx.data()),
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd_ = fftw_plan_dft_c2r_1d(m_, reinterpret_cast<fftw_complex*>(cx.data()),
                                    re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    ~RealFft() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    int size() const { return m_; }
    int spectrum_size() const { return m_ / 2 + 1; }

    // out must have spectrum_size() entries; in must have size() entries.
    void forward(const double* in, std::complex<double>* out) const {
        fftw_execute_dft_r2c(fwd_, const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    }

    // Unnormalized inverse; caller divides by size(). Destroys `in`.
    void backward(std::complex<double>* in, double* out) const {
        fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(in), out);
    }

  private:
    int m_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

// Linear convolution of a signal (length n) with a fixed symmetric kernel of
// offsets -(nk-1)..(nk-1), returning outputs at offsets 0..n-1. The circular
// transform size is chosen so the needed window is wrap-free.
class ConvolutionPlan {
  public:
    ConvolutionPlan(std::vector<double> kernel, int signal_len)
        : n_(signal_len),
          klen_(static_cast<int>(kernel.size())),
          half_((klen_ - 1) / 2),
          m_(pick_size(signal_len, klen_)),
          fft_(m_),
          kernel_hat_(fft_.spectrum_size()) {
        std::vector<double> pad(m_, 0.0);
        for (int i = 0; i < klen_; ++i) pad[i] = kernel[i];
        fft_.forward(pad.data(), kernel_hat_.data());
    }

    // out[i] = sum_j in[j] * kernel[(i - j) + half], i = 0..n-1.
    void apply(const std::vector<double>& in, std::vector<double>& out) const {
        std::vector<double> pad(m_, 0.0);
        for (int i = 0; i < n_; ++i) pad[i] = in[i];
        std::vector<std::complex<double>> hat(fft_.spectrum_size());
        fft_.forward(pad.data(), hat.data());
        for (int k = 0; k < static_cast<int>(hat.size()); ++k) hat[k] *= kernel_hat_[k];
        fft_.backward(hat.data(), pad.data());
        out.resize(n_);
        const double inv = 1.0 / m_;
        for (int i = 0; i < n_; ++i) out[i] = pad[i + half_] * inv;
    }

  private:
    static int pick_size(int n, int klen) {
        // full linear support is n + klen - 1; wrap-free window needs m >= that
        int m = n + klen - 1;
        if (m % 2 != 0) ++m;
        return m;
    }

    int n_;
    int klen_;
    int half_;
    int m_;
    RealFft fft_;
    std::vector<std::complex<double>> kernel_hat_;
};

}  // namespace fracpme
