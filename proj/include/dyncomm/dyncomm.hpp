#pragma once

#include "dyncomm/benchgen.hpp"
#include "dyncomm/detect.hpp"
#include "dyncomm/graph.hpp"
#include "dyncomm/membership.hpp"
#include "dyncomm/metrics.hpp"
#include "dyncomm/model.hpp"
#include "dyncomm/random.hpp"
#include "dyncomm/sampler.hpp"
