#include "turbosim/kernels.hpp"

namespace turbosim::kernels {

void relax_shift_scalar(const std::int64_t* src_value, const std::int64_t* src_cost,
                        std::int64_t add_value, std::int64_t add_cost, std::int64_t choice,
                        std::size_t shift, std::int64_t* dst_value, std::int64_t* dst_cost,
                        std::int64_t* dst_choice, std::size_t n) {
    for (std::size_t w = shift; w < n; ++w) {
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
