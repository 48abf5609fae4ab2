#ifndef POTKERN_POTKERN_HPP
#define POTKERN_POTKERN_HPP

// Szego, Garabedian, Ahlfors, Bergman, Lambda and Poisson kernels of smooth
// finitely connected planar domains.

#include "core.hpp"
#include "geometry.hpp"
#include "integral_eq.hpp"
#include "szego.hpp"
#include "bergman.hpp"
#include "harmonic.hpp"
#include "reference.hpp"
#include "io.hpp"
#include "study.hpp"

#endif // POTKERN_POTKERN_HPP
