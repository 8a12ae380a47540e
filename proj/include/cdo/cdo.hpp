#pragma once

#include "cdo/decision.hpp"
#include "cdo/error.hpp"
#include "cdo/expand.hpp"
#include "cdo/formula.hpp"
#include "cdo/fuzz.hpp"
#include "cdo/io.hpp"
#include "cdo/model.hpp"
#include "cdo/priority.hpp"
#include "cdo/random.hpp"
#include "cdo/semantics.hpp"
#include "cdo/signature.hpp"
#include "cdo/syntax.hpp"
