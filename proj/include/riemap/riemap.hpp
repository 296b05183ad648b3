#pragma once

// Umbrella header: chart manifolds, Frenet curves, Riemannian-map geometry,
// isotropy/umbilicity diagnostics, curve transport checks and the scenario
// runner.

#include "riemap/diff.hpp"
#include "riemap/dual2.hpp"
#include "riemap/expr.hpp"
#include "riemap/frenet.hpp"
#include "riemap/isotropy.hpp"
#include "riemap/linalg.hpp"
#include "riemap/manifold.hpp"
#include "riemap/map.hpp"
#include "riemap/ode.hpp"
#include "riemap/registry.hpp"
#include "riemap/rmap.hpp"
#include "riemap/rng.hpp"
#include "riemap/run.hpp"
#include "riemap/scenario.hpp"
#include "riemap/transport.hpp"
#include "riemap/version.hpp"
