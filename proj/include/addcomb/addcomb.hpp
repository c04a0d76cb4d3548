#pragma once

#include "addcomb/checks.hpp"
#include "addcomb/counting.hpp"
#include "addcomb/error.hpp"
#include "addcomb/extremal.hpp"
#include "addcomb/forms.hpp"
#include "addcomb/fourier.hpp"
#include "addcomb/gowers.hpp"
#include "addcomb/harness.hpp"
#include "addcomb/matrix.hpp"
#include "addcomb/nil.hpp"
#include "addcomb/numtheory.hpp"
#include "addcomb/periodic.hpp"
#include "addcomb/random.hpp"
#include "addcomb/rational.hpp"
#include "addcomb/reference.hpp"
