#pragma once

#include "qtbf/gf2.hpp"
#include "qtbf/code.hpp"
#include "qtbf/code_spec.hpp"
#include "qtbf/tanner.hpp"
#include "qtbf/trapping.hpp"
#include "qtbf/decoders.hpp"
#include "qtbf/registry.hpp"
#include "qtbf/collective.hpp"
#include "qtbf/parallel.hpp"
#include "qtbf/setgen.hpp"
#include "qtbf/sim.hpp"
