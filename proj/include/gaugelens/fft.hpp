#pragma once
// Thin RAII wrapper over FFTW3 complex-to-complex 2D transforms.
//
// Plans are created with FFTW_ESTIMATE on purpose: MEASURE self-times and may
// pick different algorithms from run to run, which would break bit-identical
// reproducibility. The FFTW planner is not thread-safe, so plan creation and
// destruction are serialized behind a global mutex; execution is safe to run
// concurrently on distinct buffers.

#include <complex>
#include <cstddef>
#include <mutex>
#include <new>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace gaugelens {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Allocator piggybacking on fftw_malloc so every field buffer shares the
// SIMD alignment the plans were created with.
template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) {}
    T* allocate(std::size_t n) {
        void* p = fftw_malloc(n * sizeof(T));
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { fftw_free(p); }
    template <class U>
    bool operator==(const FftwAllocator<U>&) const { return true; }
};

using cvec = std::vector<std::complex<double>, FftwAllocator<std::complex<double>>>;

class Fft2D {
  public:
    Fft2D(int n0, int n1) : n0_(n0), n1_(n1), scratch_(std::size_t(n0) * n1) {
        std::lock_guard<std::mutex> lk(fftw_planner_mutex());
        auto* buf = reinterpret_cast<fftw_complex*>(scratch_.data());
        fwd_ = fftw_plan_dft_2d(n0, n1, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_2d(n0, n1, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw std::runtime_error("Fft2D: plan creation failed");
    }
    ~Fft2D() {
        std::lock_guard<std::mutex> lk(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    int n0() const { return n0_; }
    int n1() const { return n1_; }

    // In-place unnormalized transforms; callers fold the 1/(n0*n1) factor
    // into whatever spectral multiplier they apply.
    void forward(cvec& x) const { exec(fwd_, x); }
    void backward(cvec& x) const { exec(bwd_, x); }

    double norm_factor() const { return 1.0 / (double(n0_) * double(n1_)); }

  private:
    void exec(fftw_plan p, cvec& x) const {
        if (x.size() != std::size_t(n0_) * n1_)
            throw std::invalid_argument("Fft2D: buffer size mismatch");
        auto* buf = reinterpret_cast<fftw_complex*>(x.data());
        fftw_execute_dft(p, buf, buf);
    }
    int n0_, n1_;
    cvec scratch_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

}  // namespace gaugelens
