#pragma once

#include "ld3/baselines.hpp"
#include "ld3/classifier.hpp"
#include "ld3/detector.hpp"
#include "ld3/errors.hpp"
#include "ld3/eval.hpp"
#include "ld3/label_vector.hpp"
#include "ld3/rankfusion.hpp"
#include "ld3/report.hpp"
#include "ld3/streams.hpp"
