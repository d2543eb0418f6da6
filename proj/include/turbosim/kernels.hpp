#pragma once

#include <cstddef>
#include <cstdint>

namespace turbosim::kernels {

// The knapsack relaxation that dominates exact-solve time. For every budget
// position w >= shift, the candidate
//     (src_value[w - shift] + add_value, src_cost[w - shift] + add_cost)
// replaces (dst_value[w], dst_cost[w], dst_choice[w]) when it is better:
// strictly higher value, or equal value at strictly lower cost. On a
// replacement dst_choice[w] becomes `choice`.
//
// src and dst must not alias. Positions below `shift` are untouched.
using RelaxShiftFn = void (*)(const std::int64_t* src_value, const std::int64_t* src_cost,
                              std::int64_t add_value, std::int64_t add_cost, std::int64_t choice,
                              std::size_t shift, std::int64_t* dst_value, std::int64_t* dst_cost,
                              std::int64_t* dst_choice, std::size_t n);

enum class Impl {
    auto_detect,  // best variant the CPU supports
    scalar,
    avx2,
};

/// Reference implementation; always available.
void relax_shift_scalar(const std::int64_t* src_value, const std::int64_t* src_cost,
                        std::int64_t add_value, std::int64_t add_cost, std::int64_t choice,
                        std::size_t shift, std::int64_t* dst_value, std::int64_t* dst_cost,
                        std::int64_t* dst_choice, std::size_t n);

/// True when this build carries the variant and the CPU can run it.
bool available(Impl impl);

/// Selects the active variant for subsequent solves. Throws ValidationError
/// when the variant is unavailable. Call before solving, not concurrently
/// with solves.
void select(Impl impl);

/// Variant currently dispatched to.
Impl active();
const char* impl_name(Impl impl);

/// Dispatched entry point used by the solvers.
void relax_shift(const std::int64_t* src_value, const std::int64_t* src_cost,
                 std::int64_t add_value, std::int64_t add_cost, std::int64_t choice,
                 std::size_t shift, std::int64_t* dst_value, std::int64_t* dst_cost,
                 std::int64_t* dst_choice, std::size_t n);

} // namespace turbosim::kernels
