#pragma once

// Umbrella header for the hotelml toolkit: columnar event-log handling,
// label coarsening via k-means, from-scratch classifiers and ensembles, and
// the cross-validation experiment harness.

#include "hotelml/dataset.hpp"
#include "hotelml/decision_tree.hpp"
#include "hotelml/ensemble.hpp"
#include "hotelml/error.hpp"
#include "hotelml/evaluation.hpp"
#include "hotelml/features.hpp"
#include "hotelml/kmeans.hpp"
#include "hotelml/knn.hpp"
#include "hotelml/linalg.hpp"
#include "hotelml/logistic_regression.hpp"
#include "hotelml/model_io.hpp"
#include "hotelml/naive_bayes.hpp"
#include "hotelml/pipeline.hpp"
#include "hotelml/rng.hpp"
#include "hotelml/synthetic.hpp"
#include "hotelml/timestamp.hpp"
