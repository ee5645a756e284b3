#ifndef HOSTFORGE_PARALLEL_HPP_
#define HOSTFORGE_PARALLEL_HPP_

namespace hostforge {

/// Kernels that fan out over hosts or rounds keep a serial reference path.
/// Both paths produce bit-identical results.
enum class Execution { serial, parallel };

/// Worker count used by parallel kernels: HOSTFORGE_THREADS when set to a
/// positive integer, otherwise the OpenMP default.
int worker_count();

/// Overrides the worker count for subsequent parallel kernels; n < 1 restores
/// the default.
void set_worker_count(int n);

/// True when the library was built with OpenMP.
bool has_openmp();

}  // namespace hostforge

#endif  // HOSTFORGE_PARALLEL_HPP_
