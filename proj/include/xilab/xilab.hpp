#ifndef XILAB_XILAB_HPP
#define XILAB_XILAB_HPP

#include "xilab/core_stat.hpp"
#include "xilab/csv.hpp"
#include "xilab/densities.hpp"
#include "xilab/error.hpp"
#include "xilab/harness.hpp"
#include "xilab/models.hpp"
#include "xilab/normal.hpp"
#include "xilab/oracle_stat.hpp"
#include "xilab/parallel.hpp"
#include "xilab/quadrature.hpp"
#include "xilab/rng.hpp"
#include "xilab/theory.hpp"
#include "xilab/wasserstein.hpp"

#endif  // XILAB_XILAB_HPP
