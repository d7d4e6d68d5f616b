#ifndef VACUUMSQ_VACUUMSQ_HPP
#define VACUUMSQ_VACUUMSQ_HPP

#include "vacuumsq/core.hpp"
#include "vacuumsq/spin_moments.hpp"
#include "vacuumsq/analytic.hpp"
#include "vacuumsq/io.hpp"
#include "vacuumsq/dicke.hpp"
#include "vacuumsq/oracle.hpp"
#include "vacuumsq/optimize.hpp"
#include "vacuumsq/config.hpp"
#include "vacuumsq/pipeline.hpp"

#endif  // VACUUMSQ_VACUUMSQ_HPP
