#pragma once

// Umbrella header for the whole toolkit.

#include "rate/adam.hpp"
#include "rate/checkpoint.hpp"
#include "rate/complex_ops.hpp"
#include "rate/config.hpp"
#include "rate/errors.hpp"
#include "rate/evaluation.hpp"
#include "rate/gradcheck.hpp"
#include "rate/gradients.hpp"
#include "rate/graph_index.hpp"
#include "rate/loss.hpp"
#include "rate/reports.hpp"
#include "rate/rng.hpp"
#include "rate/sampling.hpp"
#include "rate/scoring.hpp"
#include "rate/spatial.hpp"
#include "rate/trainer.hpp"
#include "rate/triple_store.hpp"
#include "rate/types.hpp"
#include "rate/vocab.hpp"
