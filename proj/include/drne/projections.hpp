#pragma once

#include "drne/game.hpp"
#include "drne/types.hpp"

namespace drne {

class VIProblem;

/// Euclidean projection onto X_i. Simplex uses the sort-based threshold rule.
Vector project_local(const LocalSet& set, const Vector& v);

/// Euclidean projection onto the unit simplex {y >= 0, sum y = 1}.
Vector project_simplex(const Vector& v);

/// Per agent: project x_i onto X_i and clamp lambda_i to its floor.
Vector project_Z(const VIProblem& problem, const Vector& z);

} // namespace drne
