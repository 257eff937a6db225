#include "cfreq/chirpz.hpp"

#include "cfreq/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace cfreq {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

int next_pow2(int v) {
    int s = 1;
    while (s < v) s <<= 1;
    return s;
}

}  // namespace

struct ChirpZ::Buffer {
    fftw_complex* data = nullptr;
};

ChirpZ::ChirpZ(int n_in, int count, double phi) : n_in_(n_in), count_(count) {
    if (n_in < 1 || count < 1) fail(ErrorKind::Domain, "chirp-z: empty transform");
    size_ = next_pow2(n_in + count - 1);
    const int span = std::max(n_in, count);
    chirp_.resize(static_cast<std::size_t>(span));
    for (int i = 0; i < span; ++i) {
        const double ii = static_cast<double>(i);
        chirp_[static_cast<std::size_t>(i)] = std::polar(1.0, -0.5 * phi * ii * ii);
    }
    Buffer* tmp = make_buffer();
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        forward_ = fftw_plan_dft_1d(size_, tmp->data, tmp->data, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_1d(size_, tmp->data, tmp->data, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    std::memset(tmp->data, 0, sizeof(fftw_complex) * static_cast<std::size_t>(size_));
    for (int d = -(n_in - 1); d <= count - 1; ++d) {
        const double dd = static_cast<double>(d);
        const std::complex<double> b = std::polar(1.0, 0.5 * phi * dd * dd);
        const int slot = d >= 0 ? d : d + size_;
        tmp->data[slot][0] = b.real();
        tmp->data[slot][1] = b.imag();
    }
    fftw_execute_dft(static_cast<fftw_plan>(forward_), tmp->data, tmp->data);
    kernel_f_.resize(static_cast<std::size_t>(size_));
    for (int i = 0; i < size_; ++i) kernel_f_[static_cast<std::size_t>(i)] = {tmp->data[i][0], tmp->data[i][1]};
    free_buffer(tmp);
}

ChirpZ::~ChirpZ() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

ChirpZ::Buffer* ChirpZ::make_buffer() const {
    auto* buf = new Buffer;
    buf->data = fftw_alloc_complex(static_cast<std::size_t>(size_));
    if (!buf->data) {
        delete buf;
        fail(ErrorKind::Numeric, "chirp-z: allocation failed");
    }
    return buf;
}

void ChirpZ::free_buffer(Buffer* buf) {
    if (!buf) return;
    fftw_free(buf->data);
    delete buf;
}

void ChirpZ::transform(const std::complex<double>* y, std::complex<double>* out, Buffer& buf) const {
    fftw_complex* a = buf.data;
    for (int i = 0; i < n_in_; ++i) {
        const std::complex<double> v = y[i] * chirp_[static_cast<std::size_t>(i)];
        a[i][0] = v.real();
        a[i][1] = v.imag();
    }
    std::memset(a + n_in_, 0, sizeof(fftw_complex) * static_cast<std::size_t>(size_ - n_in_));
    fftw_execute_dft(static_cast<fftw_plan>(forward_), a, a);
    for (int i = 0; i < size_; ++i) {
        const std::complex<double> v = std::complex<double>(a[i][0], a[i][1]) * kernel_f_[static_cast<std::size_t>(i)];
        a[i][0] = v.real();
        a[i][1] = v.imag();
    }
    fftw_execute_dft(static_cast<fftw_plan>(backward_), a, a);
    const double scale = 1.0 / size_;
    for (int q = 0; q < count_; ++q)
        out[q] = scale * std::complex<double>(a[q][0], a[q][1]) * chirp_[static_cast<std::size_t>(q)];
}

}  // namespace cfreq
