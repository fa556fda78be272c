#pragma once

#include <fftw3.h>

#include <complex>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace cyclores {

using cdouble = std::complex<double>;

/// fftw_malloc-backed allocator so every buffer shares the alignment the
/// cached plans were created with (new-array execute requirement).
template <typename T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() = default;
    template <typename U>
    FftwAllocator(const FftwAllocator<U>&) {}
    T* allocate(std::size_t n) {
        void* p = fftw_malloc(n * sizeof(T));
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { fftw_free(p); }
    template <typename U>
    bool operator==(const FftwAllocator<U>&) const { return true; }
};

using cvector = std::vector<cdouble, FftwAllocator<cdouble>>;

namespace detail {

inline std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

inline int& fftw_threads_setting() {
    static int n = [] {
        if (const char* env = std::getenv("CYCLO_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        return 2;
    }();
    return n;
}

inline void fftw_global_init() {
    static bool done = [] {
        fftw_init_threads();
        return true;
    }();
    (void)done;
}

/// Plans for one grid size: in-place 2D transforms plus batched 1D row/column
/// transforms for the shear rotations.  FFTW_ESTIMATE keeps planning
/// deterministic run to run.
struct PlanSet {
    int n = 0;
    fftw_plan fwd2d = nullptr, bwd2d = nullptr;
    fftw_plan fwd_rows = nullptr, bwd_rows = nullptr;  // transform along y (contiguous)
    fftw_plan fwd_cols = nullptr, bwd_cols = nullptr;  // transform along x (strided)

    explicit PlanSet(int n_) : n(n_) {
        fftw_global_init();
        fftw_plan_with_nthreads(fftw_threads_setting());
        cvector scratch((std::size_t)n * n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fwd2d = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd2d = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        // layout: a[ix*n + iy]; rows = fixed ix, contiguous in iy
        int sz = n;
        fwd_rows = fftw_plan_many_dft(1, &sz, n, buf, nullptr, 1, n, buf, nullptr, 1, n,
                                      FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_rows = fftw_plan_many_dft(1, &sz, n, buf, nullptr, 1, n, buf, nullptr, 1, n,
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
        fwd_cols = fftw_plan_many_dft(1, &sz, n, buf, nullptr, n, 1, buf, nullptr, n, 1,
                                      FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_cols = fftw_plan_many_dft(1, &sz, n, buf, nullptr, n, 1, buf, nullptr, n, 1,
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd2d || !bwd2d || !fwd_rows || !bwd_rows || !fwd_cols || !bwd_cols)
            throw std::runtime_error("fftw planning failed");
    }
    ~PlanSet() {
        for (fftw_plan p : {fwd2d, bwd2d, fwd_rows, bwd_rows, fwd_cols, bwd_cols})
            if (p) fftw_destroy_plan(p);
    }
    PlanSet(const PlanSet&) = delete;
    PlanSet& operator=(const PlanSet&) = delete;
};

inline const PlanSet& plans_for(int n) {
    static std::map<int, std::unique_ptr<PlanSet>> registry;
    std::lock_guard<std::mutex> lock(fftw_mutex());
    auto it = registry.find(n);
    if (it == registry.end())
        it = registry.emplace(n, std::make_unique<PlanSet>(n)).first;
    return *it->second;
}

}  // namespace detail

enum class FftAxis { Both, Rows, Cols };

/// In-place unnormalized forward DFT.
inline void fft_forward(cvector& a, int n, FftAxis axis = FftAxis::Both) {
    const auto& ps = detail::plans_for(n);
    auto* buf = reinterpret_cast<fftw_complex*>(a.data());
    switch (axis) {
        case FftAxis::Both: fftw_execute_dft(ps.fwd2d, buf, buf); break;
        case FftAxis::Rows: fftw_execute_dft(ps.fwd_rows, buf, buf); break;
        case FftAxis::Cols: fftw_execute_dft(ps.fwd_cols, buf, buf); break;
    }
}

/// In-place inverse DFT, normalized so that fft_inverse(fft_forward(a)) = a.
inline void fft_inverse(cvector& a, int n, FftAxis axis = FftAxis::Both) {
    const auto& ps = detail::plans_for(n);
    auto* buf = reinterpret_cast<fftw_complex*>(a.data());
    double scale = 1.0;
    switch (axis) {
        case FftAxis::Both:
            fftw_execute_dft(ps.bwd2d, buf, buf);
            scale = 1.0 / ((double)n * n);
            break;
        case FftAxis::Rows:
            fftw_execute_dft(ps.bwd_rows, buf, buf);
            scale = 1.0 / n;
            break;
        case FftAxis::Cols:
            fftw_execute_dft(ps.bwd_cols, buf, buf);
            scale = 1.0 / n;
            break;
    }
    for (auto& v : a) v *= scale;
}

}  // namespace cyclores
