#pragma once

// Umbrella header.

#include "grigid/affine.hpp"
#include "grigid/attractor.hpp"
#include "grigid/cover.hpp"
#include "grigid/direction.hpp"
#include "grigid/fitter.hpp"
#include "grigid/geometry.hpp"
#include "grigid/graph.hpp"
#include "grigid/ifs_io.hpp"
#include "grigid/parallel.hpp"
#include "grigid/point_set.hpp"
#include "grigid/report.hpp"
#include "grigid/rng.hpp"
#include "grigid/similitude.hpp"
#include "grigid/svg.hpp"
