#pragma once

#include "mlgc/baselines.hpp"
#include "mlgc/clustering.hpp"
#include "mlgc/data_io.hpp"
#include "mlgc/errors.hpp"
#include "mlgc/experiment.hpp"
#include "mlgc/graph.hpp"
#include "mlgc/metrics.hpp"
#include "mlgc/objective.hpp"
#include "mlgc/optimizer.hpp"
#include "mlgc/rng.hpp"
#include "mlgc/spectral.hpp"
