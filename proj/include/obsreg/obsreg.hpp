#ifndef OBSREG_OBSREG_HPP
#define OBSREG_OBSREG_HPP

// Umbrella header: pseudo-spectral reference solver, modal/nodal observation,
// five-tetrahedra interpolation, the observable regularity criterion, and the
// nudging data-assimilation system on the periodic box.

#include "core.hpp"
#include "fields.hpp"
#include "io.hpp"
#include "monitor.hpp"
#include "nudging.hpp"
#include "observers.hpp"
#include "solver.hpp"
#include "spectral.hpp"
#include "tetra.hpp"

#endif
