#include "krflow/base_geometry.hpp"

#include <cmath>
#include <string>

#include "krflow/errors.hpp"

namespace krf {

void BaseGeometry::validate() const {
  if (mu != 0 && mu != 1) fail(ErrorKind::InvalidArgument, "mu must be 0 or 1, got " + std::to_string(mu));
  if (mu == 1 && n < 2) fail(ErrorKind::InvalidArgument, "n >= 2 required when mu = 1");
  if (n < 1) fail(ErrorKind::InvalidArgument, "n must be positive");
  if (orbifold_k < 1) fail(ErrorKind::InvalidArgument, "orbifold_k must be >= 1");
  if (!std::isfinite(lambda)) fail(ErrorKind::InvalidArgument, "lambda must be finite");
}

}  // namespace krf
