#pragma once

#include "biortho/composite.hpp"
#include "biortho/dynamics.hpp"
#include "biortho/eig.hpp"
#include "biortho/errors.hpp"
#include "biortho/geometry.hpp"
#include "biortho/io.hpp"
#include "biortho/matrix.hpp"
#include "biortho/observables.hpp"
#include "biortho/perturbation.hpp"
#include "biortho/pt_metric.hpp"
#include "biortho/system.hpp"
#include "biortho/version.hpp"
