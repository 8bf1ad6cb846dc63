#pragma once

#include "gdof/gdof_core.hpp"
#include "gdof/lemma_coeff.hpp"
#include "gdof/det_model.hpp"
#include "gdof/mac_region.hpp"
#include "gdof/scheme_planner.hpp"
#include "gdof/ais_oracle.hpp"
#include "gdof/curve.hpp"
