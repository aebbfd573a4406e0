#pragma once

#include <memory>
#include <span>

#include "nanopair/cda.hpp"

namespace nanopair::cda::detail {

// out_j = Σ_{k≠j} G(r_j - r_k) in_k, vectors stored site-major (3j + c).
// Instances own scratch buffers: one per thread.
class InteractionOperator {
 public:
  virtual ~InteractionOperator() = default;
  virtual void apply(std::span<const cplx> in, std::span<cplx> out) = 0;
};

std::unique_ptr<InteractionOperator> make_interaction(const LatticeGeometry& lattice,
                                                      double wavenumber, GreenBackend backend);

}  // namespace nanopair::cda::detail
