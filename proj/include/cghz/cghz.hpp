#pragma once

#include "cghz/analysis.hpp"
#include "cghz/entangler.hpp"
#include "cghz/errors.hpp"
#include "cghz/homodyne.hpp"
#include "cghz/hybrid_state.hpp"
#include "cghz/optical_elements.hpp"
#include "cghz/pattern.hpp"
#include "cghz/protocols.hpp"
#include "cghz/rng.hpp"
