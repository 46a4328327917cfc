#include "gfcx/core/code_space.hpp"

#include "gfcx/core/error.hpp"

namespace gfcx {

BigInt code_space_size(int min_len, int max_len, std::uint64_t alphabet_size)
{
    if (min_len < 1 || max_len < min_len || max_len > 8 || alphabet_size < 1)
        throw Error(Errc::InvalidRange, "need 1 <= min_len <= max_len <= 8 and alphabet_size >= 1");
    BigInt total = 0;
    BigInt power = 1;
    for (int k = 1; k <= max_len; ++k) {
        power *= alphabet_size;
        if (k >= min_len)
            total += power;
    }
    return total;
}

} // namespace gfcx
