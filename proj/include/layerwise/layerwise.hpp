#pragma once
// layerwise.hpp - umbrella include.

#include "brownian.hpp"
#include "cantor.hpp"
#include "choice.hpp"
#include "codec.hpp"
#include "dyadic.hpp"
#include "error.hpp"
#include "hitting.hpp"
#include "interval.hpp"
#include "io.hpp"
#include "limit_laws.hpp"
#include "ml_tests.hpp"
#include "normal.hpp"
