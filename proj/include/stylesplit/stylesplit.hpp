#pragma once

#include "stylesplit/attribution.hpp"
#include "stylesplit/cluster.hpp"
#include "stylesplit/corpus.hpp"
#include "stylesplit/error.hpp"
#include "stylesplit/features.hpp"
#include "stylesplit/io.hpp"
#include "stylesplit/matching.hpp"
#include "stylesplit/ncd.hpp"
#include "stylesplit/svg.hpp"
