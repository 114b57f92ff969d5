#pragma once

// Umbrella header for the finbeam library.

#include "finbeam/model.hpp"
#include "finbeam/element.hpp"
#include "finbeam/assembly.hpp"
#include "finbeam/solver.hpp"
#include "finbeam/finray.hpp"
#include "finbeam/verify.hpp"
#include "finbeam/structure_io.hpp"
#include "finbeam/scenario.hpp"
#include "finbeam/study.hpp"
