#pragma once

namespace burstmap {

// Principal branch W0 of the Lambert W function, x >= -1/e.
// Solves W * exp(W) = x by Halley iteration (tolerance 1e-12, at most 50
// iterations). Throws DomainError for x < -1/e.
double lambert_w0(double x);

}  // namespace burstmap
