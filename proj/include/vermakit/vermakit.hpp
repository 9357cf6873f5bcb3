#pragma once

#include "cli.hpp"
#include "constraints.hpp"
#include "graph.hpp"
#include "graph_io.hpp"
#include "machine_report.hpp"
#include "oracle.hpp"
#include "q_algebra.hpp"
#include "qexpr.hpp"
#include "varset.hpp"
