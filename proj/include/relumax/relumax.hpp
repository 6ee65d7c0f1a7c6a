#pragma once

#include "relumax/bounds.hpp"
#include "relumax/constructions.hpp"
#include "relumax/errors.hpp"
#include "relumax/graph.hpp"
#include "relumax/lp.hpp"
#include "relumax/network.hpp"
#include "relumax/pipeline.hpp"
#include "relumax/random.hpp"
#include "relumax/rational.hpp"
#include "relumax/regions.hpp"
#include "relumax/serialize.hpp"
#include "relumax/transforms.hpp"
#include "relumax/verify.hpp"
