#pragma once

#include "tneedlet/densities.hpp"
#include "tneedlet/estimation.hpp"
#include "tneedlet/needlet_frame.hpp"
#include "tneedlet/parallel.hpp"
#include "tneedlet/random.hpp"
#include "tneedlet/risk_bench.hpp"
#include "tneedlet/torus_harmonics.hpp"
#include "tneedlet/window.hpp"
