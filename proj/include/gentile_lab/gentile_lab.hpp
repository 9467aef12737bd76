#pragma once

#include "gentile_lab/asymptotics.hpp"
#include "gentile_lab/equivalence.hpp"
#include "gentile_lab/errors.hpp"
#include "gentile_lab/partition_core.hpp"
#include "gentile_lab/special_functions.hpp"
#include "gentile_lab/thermo.hpp"
