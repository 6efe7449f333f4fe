#pragma once

#include "chibounds/error.hpp"
#include "chibounds/tolerances.hpp"
#include "chibounds/poscone.hpp"
#include "chibounds/gaussian.hpp"
#include "chibounds/spin.hpp"
#include "chibounds/su11.hpp"
#include "chibounds/saturation.hpp"
#include "chibounds/io.hpp"
#include "chibounds/cli.hpp"
