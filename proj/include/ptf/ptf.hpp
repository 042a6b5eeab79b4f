#pragma once

#include "ptf/bench.hpp"
#include "ptf/errors.hpp"
#include "ptf/finite_term.hpp"
#include "ptf/lp_core.hpp"
#include "ptf/newton_kernel.hpp"
#include "ptf/path_methods.hpp"
#include "ptf/random.hpp"
#include "ptf/report.hpp"
#include "ptf/target_space.hpp"
