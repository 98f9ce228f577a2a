#pragma once

#include "dreject/cdf_function.hpp"
#include "dreject/data_io.hpp"
#include "dreject/dataset.hpp"
#include "dreject/eval.hpp"
#include "dreject/forest.hpp"
#include "dreject/gaussian.hpp"
#include "dreject/knn.hpp"
#include "dreject/math.hpp"
#include "dreject/regressor.hpp"
#include "dreject/rng.hpp"
#include "dreject/scoring.hpp"
#include "dreject/selective.hpp"
#include "dreject/synthetic.hpp"
#include "dreject/version.hpp"
#include "dreject/weighted_empirical.hpp"
