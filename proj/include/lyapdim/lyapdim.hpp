#pragma once

#include "lyapdim/errors.hpp"
#include "lyapdim/integrate.hpp"
#include "lyapdim/io.hpp"
#include "lyapdim/lyap.hpp"
#include "lyapdim/model.hpp"
#include "lyapdim/parallel.hpp"
#include "lyapdim/rng.hpp"
#include "lyapdim/scan.hpp"
#include "lyapdim/theory.hpp"
