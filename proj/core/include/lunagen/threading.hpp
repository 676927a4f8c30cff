// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace lunagen {

/// Global worker cap (the CLI's --threads). Defaults to hardware concurrency.
int max_threads();
void set_max_threads(int n);

/// Runs fn(begin, end) over disjoint chunks of [0, n) on up to `threads`
/// workers (<= 0 means the global cap). Chunks are assigned dynamically, so
/// fn must not depend on which worker runs a chunk; all output written through
/// disjoint indices is deterministic regardless of scheduling.
void parallel_for_chunks(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace lunagen
