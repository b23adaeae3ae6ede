#pragma once

#include "nongauss/catalog.hpp"
#include "nongauss/channels.hpp"
#include "nongauss/error.hpp"
#include "nongauss/fock.hpp"
#include "nongauss/gaussian.hpp"
#include "nongauss/io.hpp"
#include "nongauss/map_measure.hpp"
#include "nongauss/measure.hpp"
#include "nongauss/moments.hpp"
#include "nongauss/parallel.hpp"
#include "nongauss/phasespace.hpp"
#include "nongauss/random.hpp"
#include "nongauss/reports.hpp"
#include "nongauss/special.hpp"
#include "nongauss/symplectic.hpp"
