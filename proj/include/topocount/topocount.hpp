#pragma once

#include "topocount/error.hpp"
#include "topocount/signals.hpp"
#include "topocount/mixing.hpp"
#include "topocount/embedding.hpp"
#include "topocount/barcode.hpp"
#include "topocount/persistence.hpp"
#include "topocount/estimation.hpp"
#include "topocount/baselines.hpp"
#include "topocount/experiment.hpp"
