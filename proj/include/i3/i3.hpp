#pragma once

#include "i3/corpus.hpp"
#include "i3/error.hpp"
#include "i3/fractional.hpp"
#include "i3/indicators.hpp"
#include "i3/percentile.hpp"
#include "i3/report.hpp"
#include "i3/significance.hpp"
#include "i3/special.hpp"
#include "i3/stats.hpp"
#include "i3/synth.hpp"
