#pragma once

// Everything in one include.
#include "util.hpp"
#include "growth.hpp"
#include "dyadic.hpp"
#include "grid_function.hpp"
#include "filter_bank.hpp"
#include "maximal.hpp"
#include "sampling.hpp"
#include "reproducing.hpp"
#include "norms.hpp"
#include "atoms.hpp"
#include "quarks.hpp"
#include "trace.hpp"
#include "corpus.hpp"
#include "campaigns.hpp"
#include "params.hpp"
#include "io.hpp"
#include "suite.hpp"
