#pragma once

// Numerical check of the four-eigenvalue structure of the minimax prior
// perturbation
//   S = -c1 [(u1+v1)(u1+v1)^T + (u2+v2)(u2+v2)^T]
//       + c2 [(u1-v1)(u1-v1)^T + (u2-v2)(u2-v2)^T],
// c1 = a / (2(1 + apq)), c2 = a / (2(1 - apq)), where u = [sqrt(q) s_u; 0]
// and v = [0; sqrt(p) s_v] for sign vectors s_u in {+-1}^p, s_v in {+-1}^q.

#include <cstddef>
#include <vector>

#include "hsdcov/simgen.hpp"

namespace hsdcov {

struct SignDraw {
  std::vector<int> u1;
  std::vector<int> u2;
  std::vector<int> v1;
  std::vector<int> v2;
};

/// Independent Rademacher vectors, u's of length p and v's of length q.
SignDraw random_sign_draw(std::size_t p, std::size_t q, RngStream& rng);

struct EigenCheckReport {
  /// Largest relative deviation from the identity
  /// (1+l1)(1+l2) = (1+l3)(1+l4) = 1 + a^2/(1-(apq)^2) (p^2 q^2 - <u1,u2><v1,v2>),
  /// over the numerically computed pairs, the closed-form pairs, and the
  /// product of all 1 + lambda against the square of the right-hand side.
  double max_identity_error;
  /// Eigenvalues with |lambda| > 1e-8.
  std::size_t nontrivial_eigencount;
  /// Those eigenvalues, ascending.
  std::vector<double> lambda_values;
  /// Closed-form lambda_1..lambda_4.
  std::vector<double> closed_form_lambdas;
  double identity_value;
};

/// Throws InvalidConstruction when |a| p q >= 1 and InvalidArgument for
/// malformed sign vectors.
EigenCheckReport minimax_eigencheck(const SignDraw& draw, double a);

}  // namespace hsdcov
