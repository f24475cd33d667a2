#pragma once

#include "twinbeam/cavity_optics.hpp"
#include "twinbeam/config.hpp"
#include "twinbeam/criteria.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/fitter.hpp"
#include "twinbeam/noise_model.hpp"
#include "twinbeam/parallel.hpp"
#include "twinbeam/random.hpp"
#include "twinbeam/sweep_io.hpp"
#include "twinbeam/sweep_lab.hpp"
#include "twinbeam/twin_beam_state.hpp"
