#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace gfcx {

using BigInt = boost::multiprecision::cpp_int;

/// Number of distinct codes with length in [min_len, max_len] over an alphabet
/// of alphabet_size symbols. Requires 1 <= min_len <= max_len <= 8 and
/// alphabet_size >= 1; throws Error{InvalidRange} otherwise.
BigInt code_space_size(int min_len, int max_len, std::uint64_t alphabet_size);

} // namespace gfcx
