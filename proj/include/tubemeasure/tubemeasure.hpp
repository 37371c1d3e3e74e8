#pragma once

#include "tubemeasure/bounds.hpp"
#include "tubemeasure/covers.hpp"
#include "tubemeasure/error.hpp"
#include "tubemeasure/fsum.hpp"
#include "tubemeasure/geometry.hpp"
#include "tubemeasure/hull.hpp"
#include "tubemeasure/io.hpp"
#include "tubemeasure/packing.hpp"
#include "tubemeasure/proof.hpp"
#include "tubemeasure/random.hpp"
#include "tubemeasure/rational.hpp"
#include "tubemeasure/shape.hpp"
#include "tubemeasure/tube.hpp"
#include "tubemeasure/vector.hpp"
#include "tubemeasure/walkthrough.hpp"
