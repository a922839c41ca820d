#pragma once

#include "exemplar/batch.hpp"
#include "exemplar/bench.hpp"
#include "exemplar/device.hpp"
#include "exemplar/dissimilarity.hpp"
#include "exemplar/error.hpp"
#include "exemplar/evaluator.hpp"
#include "exemplar/ground_set.hpp"
#include "exemplar/half.hpp"
#include "exemplar/io.hpp"
#include "exemplar/objective.hpp"
#include "exemplar/optimize.hpp"
#include "exemplar/precision.hpp"
#include "exemplar/version.hpp"
#include "exemplar/work_matrix.hpp"
