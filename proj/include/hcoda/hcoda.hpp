// Convenience umbrella: the whole library in one include.
#pragma once

#include "hcoda/em.hpp"
#include "hcoda/energy.hpp"
#include "hcoda/eval.hpp"
#include "hcoda/graph.hpp"
#include "hcoda/icm.hpp"
#include "hcoda/io.hpp"
#include "hcoda/likelihood.hpp"
#include "hcoda/synthgen.hpp"
#include "hcoda/util.hpp"
