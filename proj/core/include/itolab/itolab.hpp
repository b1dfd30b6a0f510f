#pragma once

#include <itolab/brownian_path.hpp>
#include <itolab/cauchy_mc.hpp>
#include <itolab/diffusion_probe.hpp>
#include <itolab/dirichlet_mc.hpp>
#include <itolab/error.hpp>
#include <itolab/estimators.hpp>
#include <itolab/ito_calc.hpp>
#include <itolab/normal.hpp>
#include <itolab/parallel.hpp>
#include <itolab/rng.hpp>
#include <itolab/sde.hpp>
#include <itolab/time_grid.hpp>

namespace itolab {

inline constexpr const char* kVersion = "1.0.0";

} // namespace itolab
