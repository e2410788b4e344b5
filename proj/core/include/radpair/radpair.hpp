#pragma once

#include "radpair/control.hpp"
#include "radpair/hamiltonian.hpp"
#include "radpair/numerics.hpp"
#include "radpair/optimal.hpp"
#include "radpair/qfi.hpp"
#include "radpair/serialize.hpp"
#include "radpair/spin.hpp"
#include "radpair/units.hpp"
#include "radpair/yields.hpp"
