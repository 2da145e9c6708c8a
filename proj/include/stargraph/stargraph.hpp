#pragma once

#include "stargraph/grid.hpp"
#include "stargraph/spectral.hpp"
#include "stargraph/phase_space.hpp"
#include "stargraph/states.hpp"
#include "stargraph/quantum_graph.hpp"
#include "stargraph/classical_graph.hpp"
#include "stargraph/experiments.hpp"
