#pragma once

#include <complex>
#include <vector>

namespace cfreq {

/// X_q = sum_{i<n_in} y_i exp(-i q phi i), q = 0..count-1, via Bluestein's
/// algorithm on FFTW. One instance serves many inputs; transform() is safe to
/// call concurrently with distinct buffers.
class ChirpZ {
public:
    ChirpZ(int n_in, int count, double phi);
    ~ChirpZ();
    ChirpZ(const ChirpZ&) = delete;
    ChirpZ& operator=(const ChirpZ&) = delete;

    struct Buffer;
    [[nodiscard]] Buffer* make_buffer() const;
    static void free_buffer(Buffer* buf);

    void transform(const std::complex<double>* y, std::complex<double>* out, Buffer& buf) const;

    [[nodiscard]] int fft_size() const noexcept { return size_; }

private:
    int n_in_;
    int count_;
    int size_;
    std::vector<std::complex<double>> chirp_;    // z^{i^2/2}
    std::vector<std::complex<double>> kernel_f_; // FFT of z^{-d^2/2}
    void* forward_ = nullptr;
    void* backward_ = nullptr;
};

}  // namespace cfreq
