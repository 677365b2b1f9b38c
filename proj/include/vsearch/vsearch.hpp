#pragma once

#include "vsearch/geometry.hpp"
#include "vsearch/io.hpp"
#include "vsearch/partition.hpp"
#include "vsearch/planner.hpp"
#include "vsearch/rays.hpp"
#include "vsearch/sim.hpp"
#include "vsearch/strategies.hpp"
#include "vsearch/svg.hpp"
#include "vsearch/trajectory.hpp"
#include "vsearch/world.hpp"
