#pragma once

// Umbrella header.

#include "probecert/adaptive_opt.hpp"
#include "probecert/bits.hpp"
#include "probecert/errors.hpp"
#include "probecert/eval.hpp"
#include "probecert/graph_probe.hpp"
#include "probecert/greedy.hpp"
#include "probecert/hypergraph_probe.hpp"
#include "probecert/instances.hpp"
#include "probecert/lp.hpp"
#include "probecert/matroid.hpp"
#include "probecert/ratio.hpp"
#include "probecert/rng.hpp"
#include "probecert/rounding.hpp"
#include "probecert/scenario.hpp"
