#pragma once

#include "dropwarp/averaging.hpp"
#include "dropwarp/clustering.hpp"
#include "dropwarp/core_types.hpp"
#include "dropwarp/eval.hpp"
#include "dropwarp/io.hpp"
#include "dropwarp/metric.hpp"
#include "dropwarp/params.hpp"
#include "dropwarp/synth.hpp"
