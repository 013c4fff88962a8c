// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace gvdlink {

/// Execution policy for the data-parallel kernels. Both policies run the
/// same fixed-order arithmetic, so results are bitwise identical between
/// them and independent of the OpenMP thread count.
enum class Exec {
    serial,
    parallel,
};

} // namespace gvdlink
