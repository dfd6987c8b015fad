#pragma once

#include "carlbell/bisect.hpp"
#include "carlbell/cet_bellman.hpp"
#include "carlbell/domain.hpp"
#include "carlbell/error.hpp"
#include "carlbell/extremal.hpp"
#include "carlbell/foliation.hpp"
#include "carlbell/jni_bellman.hpp"
#include "carlbell/lp_bellman.hpp"
#include "carlbell/numdiff.hpp"
#include "carlbell/sampling.hpp"
#include "carlbell/verify.hpp"
