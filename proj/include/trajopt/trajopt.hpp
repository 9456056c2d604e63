#ifndef TRAJOPT_TRAJOPT_HPP
#define TRAJOPT_TRAJOPT_HPP

#include "trajopt/basis.hpp"
#include "trajopt/config.hpp"
#include "trajopt/cost.hpp"
#include "trajopt/csv.hpp"
#include "trajopt/datagen.hpp"
#include "trajopt/error.hpp"
#include "trajopt/optimizer.hpp"
#include "trajopt/pipeline.hpp"
#include "trajopt/refstats.hpp"
#include "trajopt/trajectory.hpp"
#include "trajopt/uncertainty.hpp"

#endif  // TRAJOPT_TRAJOPT_HPP
