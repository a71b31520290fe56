#pragma once

#include "musvm/diagnostics.hpp"
#include "musvm/dual_solver.hpp"
#include "musvm/error.hpp"
#include "musvm/io.hpp"
#include "musvm/kernel.hpp"
#include "musvm/model.hpp"
#include "musvm/oracle.hpp"
#include "musvm/parallel.hpp"
#include "musvm/selection.hpp"
#include "musvm/span_bound.hpp"
#include "musvm/synthetic.hpp"
#include "musvm/train.hpp"
#include "musvm/types.hpp"
