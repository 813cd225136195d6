#pragma once

#include "mpfs/space.hpp"

namespace mpfs {

enum class NormKind { L2, H1Semi, L1, LinfNodal };

/// Norm of a scalar or vector field; vector fields use the Euclidean/Frobenius pointwise norm.
double norm(const FieldVector& f, NormKind kind, const QuadratureCache& qc);

}  // namespace mpfs
