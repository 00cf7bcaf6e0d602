#pragma once

#include <optional>
#include <vector>

#include "altproj/multipoly.hpp"

namespace altproj {

/// Newton diagram data of a polynomial: the support, the vertices of the
/// compact faces of conv(supp + R^n_{>=0}), and where the boundary meets
/// each coordinate axis.
struct NewtonDiagram {
    std::vector<Exponent> support_points;
    std::vector<Exponent> boundary_vertices;  // lexicographic order
    std::vector<std::optional<unsigned>> axis_exponents;
    bool convenient = false;
};

/// Throws PreconditionError for the zero polynomial.
NewtonDiagram newton_diagram(const MultiPoly& p);

/// Lojasiewicz exponent of a convenient polynomial: the largest axis
/// exponent of its Newton diagram. Only valid when p is also nondegenerate,
/// which is not checked; callers must pass assert_nondegenerate = true.
/// Throws PreconditionError for non-convenient input and InapplicableError
/// when the nondegeneracy assertion is withheld.
Rational loja_exponent_convenient(const MultiPoly& p, bool assert_nondegenerate = true);

/// Exact feasibility of {x >= 0 : A x = b} by phase-one simplex with Bland's
/// rule. Exposed for testing.
bool lp_feasible(std::vector<std::vector<Rational>> a, std::vector<Rational> b);

}  // namespace altproj
