#pragma once

#include "fracwave/diagnostics.hpp"
#include "fracwave/dynamics.hpp"
#include "fracwave/errors.hpp"
#include "fracwave/grid.hpp"
#include "fracwave/initial_data.hpp"
#include "fracwave/normal_form.hpp"
#include "fracwave/params.hpp"
#include "fracwave/transforms.hpp"
