#pragma once

#include "polyproj/assembly.hpp"

#include <string>

namespace polyproj::problems {

/// u = 2 x1 - x2 + 4, K = I, f = 0.
ExactSolution linear_patch();

/// u = x1^2 - 3 x1 x2 - x2^2 + 5 x1, K = I, f = 0.
ExactSolution quadratic_patch();

/// u = sin(x1) exp(x2), K = I, f = 0.
ExactSolution smooth1();

/// u = x1^3 x2^2 + x1 sin(2 pi x1 x2) sin(2 pi x2) with
/// K = [[(x1+1)^2 + x2^2, -x1 x2], [-x1 x2, (x1+1)^2]].
ExactSolution variable_coefficient();

/// Patch field of the given element order (1 or 2).
ExactSolution patch(int order);

/// "smooth1" or "varK".
ExactSolution by_name(const std::string& name);

}  // namespace polyproj::problems
