#pragma once

// Convenience umbrella: pulls in the whole library.

#include "adiabatic.hpp"
#include "cli.hpp"
#include "dynamics.hpp"
#include "lindblad.hpp"
#include "model.hpp"
#include "spectral.hpp"
