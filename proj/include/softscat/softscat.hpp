#pragma once

#include "softscat/common.hpp"
#include "softscat/experiment.hpp"
#include "softscat/forward.hpp"
#include "softscat/geometry.hpp"
#include "softscat/imaging.hpp"
#include "softscat/io.hpp"
#include "softscat/specfun.hpp"
#include "softscat/xform.hpp"
