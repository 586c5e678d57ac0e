#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace uscan {

/// Run fn(i) for i in [0, n) across up to `threads` workers in fixed
/// chunks. Callers write to pre-sized slots only, so scheduling cannot
/// change results. threads <= 1 runs inline.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// FNV-1a 64-bit, used to fingerprint configs in run manifests.
std::uint64_t fnv1a64(const std::string& data);

std::string hex64(std::uint64_t v);

}  // namespace uscan
