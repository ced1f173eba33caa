#pragma once

#include "pegservo/baselines.hpp"
#include "pegservo/bench.hpp"
#include "pegservo/config.hpp"
#include "pegservo/errors.hpp"
#include "pegservo/estimator.hpp"
#include "pegservo/geometry.hpp"
#include "pegservo/heatmap.hpp"
#include "pegservo/random.hpp"
#include "pegservo/report_io.hpp"
#include "pegservo/scene.hpp"
#include "pegservo/servo.hpp"
#include "pegservo/stats.hpp"
#include "pegservo/world.hpp"
