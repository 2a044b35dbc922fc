#pragma once

#include "triplet_forge/error.hpp"
#include "triplet_forge/numkernel.hpp"
#include "triplet_forge/spaces.hpp"
#include "triplet_forge/operators.hpp"
#include "triplet_forge/certificate.hpp"
#include "triplet_forge/construct.hpp"
#include "triplet_forge/triplets.hpp"
#include "triplet_forge/generalised.hpp"
#include "triplet_forge/families.hpp"
#include "triplet_forge/io.hpp"
