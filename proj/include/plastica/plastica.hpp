#pragma once

#include "plastica/attractor.hpp"
#include "plastica/checks.hpp"
#include "plastica/core.hpp"
#include "plastica/errors.hpp"
#include "plastica/field.hpp"
#include "plastica/io.hpp"
#include "plastica/kdtree.hpp"
#include "plastica/quadrature.hpp"
#include "plastica/rk4.hpp"
#include "plastica/rng.hpp"
#include "plastica/runner.hpp"
#include "plastica/sampling.hpp"
#include "plastica/scenario.hpp"
#include "plastica/stimulus.hpp"
#include "plastica/trajectory.hpp"
