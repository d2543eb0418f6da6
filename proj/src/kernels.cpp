#include "turbosim/kernels.hpp"

#include <atomic>

#include "turbosim/errors.hpp"

namespace turbosim::kernels {

#ifdef TURBOSIM_HAVE_AVX2
void relax_shift_avx2(const std::int64_t* src_value, const std::int64_t* src_cost,
                      std::int64_t add_value, std::int64_t add_cost, std::int64_t choice,
                      std::size_t shift, std::int64_t* dst_value, std::int64_t* dst_cost,
                      std::int64_t* dst_choice, std::size_t n);
#endif

namespace {

bool cpu_has_avx2() {
#if defined(TURBOSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

RelaxShiftFn resolve(Impl impl) {
#ifdef TURBOSIM_HAVE_AVX2
    if (impl == Impl::avx2 || (impl == Impl::auto_detect && cpu_has_avx2()))
        return &relax_shift_avx2;
#endif
    (void)impl;
    return &relax_shift_scalar;
}

struct Dispatch {
    std::atomic<RelaxShiftFn> fn;
    std::atomic<Impl> impl;
    Dispatch() : fn(resolve(Impl::auto_detect)), impl(cpu_has_avx2() ? Impl::avx2 : Impl::scalar) {}
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

} // namespace

bool available(Impl impl) {
    switch (impl) {
        case Impl::auto_detect:
        case Impl::scalar:
            return true;
        case Impl::avx2:
            return cpu_has_avx2();
    }
    return false;
}

void select(Impl impl) {
    if (!available(impl))
        throw ValidationError("kernel variant unavailable on this machine");
    dispatch().fn.store(resolve(impl), std::memory_order_relaxed);
    dispatch().impl.store(impl == Impl::auto_detect ? (cpu_has_avx2() ? Impl::avx2 : Impl::scalar) : impl,
                          std::memory_order_relaxed);
}

Impl active() {
    return dispatch().impl.load(std::memory_order_relaxed);
}

const char* impl_name(Impl impl) {
    switch (impl) {
        case Impl::auto_detect: return "auto";
        case Impl::scalar: return "scalar";
        case Impl::avx2: return "avx2";
    }
    return "unknown";
}

void relax_shift(const std::int64_t* src_value, const std::int64_t* src_cost, std::int64_t add_value,
                 std::int64_t add_cost, std::int64_t choice, std::size_t shift, std::int64_t* dst_value,
                 std::int64_t* dst_cost, std::int64_t* dst_choice, std::size_t n) {
    dispatch().fn.load(std::memory_order_relaxed)(src_value, src_cost, add_value, add_cost, choice,
                                                  shift, dst_value, dst_cost, dst_choice, n);
}

} // namespace turbosim::kernels
