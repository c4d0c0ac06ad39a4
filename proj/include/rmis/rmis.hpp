#pragma once

#include "rmis/analysis.hpp"
#include "rmis/bootstrap.hpp"
#include "rmis/distance.hpp"
#include "rmis/error.hpp"
#include "rmis/io.hpp"
#include "rmis/mask.hpp"
#include "rmis/mask_io.hpp"
#include "rmis/matching.hpp"
#include "rmis/metrics.hpp"
#include "rmis/multi_metrics.hpp"
#include "rmis/pipeline.hpp"
#include "rmis/ranking.hpp"
#include "rmis/stats.hpp"
#include "rmis/table.hpp"
