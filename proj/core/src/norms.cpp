#include "mpfs/norms.hpp"

#include <cmath>

#include "mpfs/sparse.hpp"

namespace mpfs {

double norm(const FieldVector& f, NormKind kind, const QuadratureCache& qc) {
  if (kind == NormKind::LinfNodal) return norm_inf(f.values);
  double s = 0.0;
  if (f.space->components() == 1) {
    const auto v = eval_scalar(f, qc);
    s = integrate(qc, [&](std::size_t i) {
      switch (kind) {
        case NormKind::L2: return v[i].value * v[i].value;
        case NormKind::H1Semi: return dot(v[i].grad, v[i].grad);
        default: return std::abs(v[i].value);
      }
    });
  } else {
    const auto v = eval_vector(f, qc);
    s = integrate(qc, [&](std::size_t i) {
      switch (kind) {
        case NormKind::L2: return dot(v[i].value, v[i].value);
        case NormKind::H1Semi: return contract(v[i].grad, v[i].grad);
        default: return norm(v[i].value);
      }
    });
  }
  return kind == NormKind::L1 ? s : std::sqrt(s);
}

}  // namespace mpfs
