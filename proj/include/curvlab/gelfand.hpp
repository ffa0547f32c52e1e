#pragma once

#include "curvlab/gelfand/estimates.hpp"
#include "curvlab/gelfand/expression.hpp"
#include "curvlab/gelfand/extremal.hpp"
#include "curvlab/gelfand/nonlinearity.hpp"
#include "curvlab/gelfand/shooting.hpp"
