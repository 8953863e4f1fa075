#pragma once

#include "holocorr/error.hpp"
#include "holocorr/parallel.hpp"
#include "holocorr/sphere.hpp"
#include "holocorr/polyalg.hpp"
#include "holocorr/cloud.hpp"
#include "holocorr/correspondence.hpp"
#include "holocorr/families.hpp"
#include "holocorr/orbits.hpp"
#include "holocorr/poincare.hpp"
#include "holocorr/measure.hpp"
#include "holocorr/dimension.hpp"
#include "holocorr/io.hpp"
