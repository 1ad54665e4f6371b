#pragma once

#include "gkcat/curve.hpp"
#include "gkcat/errors.hpp"
#include "gkcat/geometry.hpp"
#include "gkcat/json_writer.hpp"
#include "gkcat/mat2.hpp"
#include "gkcat/monodromy.hpp"
#include "gkcat/parallel.hpp"
#include "gkcat/path.hpp"
#include "gkcat/solver.hpp"
#include "gkcat/transport.hpp"
