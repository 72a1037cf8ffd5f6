#pragma once

#include "cubeforms/constructions.hpp"
#include "cubeforms/density.hpp"
#include "cubeforms/error.hpp"
#include "cubeforms/forms.hpp"
#include "cubeforms/fourier.hpp"
#include "cubeforms/fp_core.hpp"
#include "cubeforms/io.hpp"
#include "cubeforms/numeric.hpp"
#include "cubeforms/rng.hpp"
#include "cubeforms/structure.hpp"
