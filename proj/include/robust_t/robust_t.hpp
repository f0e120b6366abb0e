#pragma once

#include "robust_t/errors.hpp"
#include "robust_t/sample.hpp"
#include "robust_t/normal.hpp"
#include "robust_t/student_t_distribution.hpp"
#include "robust_t/estimators.hpp"
#include "robust_t/statistics.hpp"
#include "robust_t/rng.hpp"
#include "robust_t/quantile_table.hpp"
#include "robust_t/table_io.hpp"
#include "robust_t/simulation.hpp"
#include "robust_t/inference.hpp"
#include "robust_t/experiments.hpp"
#include "robust_t/sample_io.hpp"
