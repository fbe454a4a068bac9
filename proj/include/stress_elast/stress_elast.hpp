#pragma once

#include "stress_elast/blas_guard.hpp"
#include "stress_elast/errors.hpp"
#include "stress_elast/tensor.hpp"
#include "stress_elast/polycalc/poly.hpp"
#include "stress_elast/polycalc/ops.hpp"
#include "stress_elast/polycalc/identities.hpp"
#include "stress_elast/formulation.hpp"
#include "stress_elast/manufactured.hpp"
#include "stress_elast/mesh.hpp"
#include "stress_elast/fespace.hpp"
#include "stress_elast/forms.hpp"
#include "stress_elast/solve.hpp"
#include "stress_elast/postproc.hpp"
#include "stress_elast/driver.hpp"
#include "stress_elast/cli/config.hpp"
#include "stress_elast/cli/commands.hpp"
