#pragma once

#include "kcurves/datasets.hpp"
#include "kcurves/errors.hpp"
#include "kcurves/experiments.hpp"
#include "kcurves/fft.hpp"
#include "kcurves/fitting.hpp"
#include "kcurves/geometry.hpp"
#include "kcurves/gram.hpp"
#include "kcurves/grf.hpp"
#include "kcurves/kernel.hpp"
#include "kcurves/lattice_theory.hpp"
#include "kcurves/learning_curve.hpp"
#include "kcurves/linalg.hpp"
#include "kcurves/parallel.hpp"
#include "kcurves/point_cloud.hpp"
#include "kcurves/random.hpp"
#include "kcurves/regression.hpp"
#include "kcurves/special_functions.hpp"
#include "kcurves/spectral_predict.hpp"
#include "kcurves/star_sum.hpp"
#include "kcurves/summation.hpp"
#include "kcurves/svm.hpp"
#include "kcurves/version.hpp"
