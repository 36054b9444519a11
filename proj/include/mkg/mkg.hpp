#pragma once

// Pseudospectral Maxwell-Klein-Gordon simulator in Lorenz gauge on the flat
// torus, plus a wave-Sobolev estimate laboratory.

#include "mkg/core.hpp"
#include "mkg/diagnostics.hpp"
#include "mkg/dynamics.hpp"
#include "mkg/estlab.hpp"
#include "mkg/field.hpp"
#include "mkg/initdata.hpp"
#include "mkg/multiplier.hpp"
#include "mkg/nullform.hpp"
#include "mkg/presets.hpp"
#include "mkg/random.hpp"
#include "mkg/series.hpp"
#include "mkg/snapshot.hpp"
#include "mkg/spacetime.hpp"
#include "mkg/state.hpp"
