#pragma once

#include "mmflow/rational.hpp"
#include "mmflow/network.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/netfile.hpp"
#include "mmflow/mwis.hpp"
#include "mmflow/max_mean_cycle.hpp"
#include "mmflow/sched_graph.hpp"
#include "mmflow/simplex.hpp"
#include "mmflow/flow_lp.hpp"
#include "mmflow/joint_solver.hpp"
#include "mmflow/baseline.hpp"
#include "mmflow/report.hpp"
