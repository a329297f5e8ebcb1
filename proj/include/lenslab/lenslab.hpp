#pragma once

#include "lenslab/constructions.hpp"
#include "lenslab/coupling.hpp"
#include "lenslab/errors.hpp"
#include "lenslab/finite_group.hpp"
#include "lenslab/fixed_space.hpp"
#include "lenslab/io.hpp"
#include "lenslab/lens.hpp"
#include "lenslab/matrix.hpp"
#include "lenslab/partition.hpp"
#include "lenslab/permutation.hpp"
#include "lenslab/random.hpp"
#include "lenslab/rational.hpp"
#include "lenslab/system.hpp"
#include "lenslab/torus.hpp"
#include "lenslab/zoo.hpp"
