#pragma once

#include "lineguide/bspline.hpp"
#include "lineguide/detector.hpp"
#include "lineguide/error.hpp"
#include "lineguide/flow.hpp"
#include "lineguide/geometry.hpp"
#include "lineguide/hungarian.hpp"
#include "lineguide/image.hpp"
#include "lineguide/lines_io.hpp"
#include "lineguide/matching.hpp"
#include "lineguide/metrics.hpp"
#include "lineguide/pipeline.hpp"
#include "lineguide/raster.hpp"
#include "lineguide/trajectory.hpp"
