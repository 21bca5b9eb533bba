#pragma once

// Umbrella header: the complete library in dependency order. Include this to
// get trees, step functions, weighted Haar systems, weight characteristics,
// operators, norms, weight factories, the claim verifier, and JSON/CSV I/O.
// The io header needs nlohmann/json (vendor/json.hpp) on the include path;
// every other header is self-contained.

#include "dyadic/error.hpp"
#include "dyadic/tree.hpp"
#include "dyadic/step.hpp"
#include "dyadic/sequence.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/characteristics.hpp"
#include "dyadic/operators.hpp"
#include "dyadic/norms.hpp"
#include "dyadic/factory.hpp"
#include "dyadic/verify.hpp"
#include "dyadic/io.hpp"
