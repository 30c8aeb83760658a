#pragma once

#include "cebound/bkm.hpp"
#include "cebound/bounds.hpp"
#include "cebound/dephasing.hpp"
#include "cebound/errors.hpp"
#include "cebound/hermitian.hpp"
#include "cebound/io.hpp"
#include "cebound/random_state.hpp"
#include "cebound/two_level.hpp"
#include "cebound/variational.hpp"
