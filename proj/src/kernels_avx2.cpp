// AVX2 variant of the knapsack relaxation. Compiled with -mavx2; only
// dispatched to after a runtime cpuid check.

#include "turbosim/kernels.hpp"

#include <immintrin.h>

namespace turbosim::kernels {

void relax_shift_avx2(const std::int64_t* src_value, const std::int64_t* src_cost,
                      std::int64_t add_value, std::int64_t add_cost, std::int64_t choice,
                      std::size_t shift, std::int64_t* dst_value, std::int64_t* dst_cost,
                      std::int64_t* dst_choice, std::size_t n) {
    const __m256i vadd_value = _mm256_set1_epi64x(add_value);
    const __m256i vadd_cost = _mm256_set1_epi64x(add_cost);
    const __m256i vchoice = _mm256_set1_epi64x(choice);

    std::size_t w = shift;
    for (; w + 4 <= n; w += 4) {
        const __m256i cand_value = _mm256_add_epi64(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src_value + (w - shift))), vadd_value);
        const __m256i cand_cost = _mm256_add_epi64(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src_cost + (w - shift))), vadd_cost);
        const __m256i cur_value = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst_value + w));
        const __m256i cur_cost = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst_cost + w));
        const __m256i cur_choice = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst_choice + w));

        const __m256i value_gt = _mm256_cmpgt_epi64(cand_value, cur_value);
        const __m256i value_eq = _mm256_cmpeq_epi64(cand_value, cur_value);
        const __m256i cost_lt = _mm256_cmpgt_epi64(cur_cost, cand_cost);
        const __m256i take = _mm256_or_si256(value_gt, _mm256_and_si256(value_eq, cost_lt));

        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst_value + w),
                            _mm256_blendv_epi8(cur_value, cand_value, take));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst_cost + w),
                            _mm256_blendv_epi8(cur_cost, cand_cost, take));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst_choice + w),
                            _mm256_blendv_epi8(cur_choice, vchoice, take));
    }
    for (; w < n; ++w) {
        const std::int64_t cand_value = src_value[w - shift] + add_value;
        const std::int64_t cand_cost = src_cost[w - shift] + add_cost;
        if (cand_value > dst_value[w] || (cand_value == dst_value[w] && cand_cost < dst_cost[w])) {
            dst_value[w] = cand_value;
            dst_cost[w] = cand_cost;
            dst_choice[w] = choice;
        }
    }
}

} // namespace turbosim::kernels
