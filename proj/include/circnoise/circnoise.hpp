#pragma once
// Gaussian periodic noise on the circle: synthesis, conditioning at t = 0,
// generator inversion, conditioned spectra, regularity and power-law MLE.

#include "circnoise/error.hpp"
#include "circnoise/rng.hpp"
#include "circnoise/spectral_core.hpp"
#include "circnoise/synthesis.hpp"
#include "circnoise/generator_inverse.hpp"
#include "circnoise/spectrum.hpp"
#include "circnoise/regularity.hpp"
#include "circnoise/mle.hpp"
#include "circnoise/stats.hpp"
#include "circnoise/io.hpp"
