#pragma once

#include "tframe/bench.hpp"
#include "tframe/error.hpp"
#include "tframe/extrapolate.hpp"
#include "tframe/image.hpp"
#include "tframe/metrics.hpp"
#include "tframe/overlap.hpp"
#include "tframe/pgm.hpp"
#include "tframe/protocol.hpp"
#include "tframe/runtime.hpp"
#include "tframe/tcp.hpp"
#include "tframe/tiling.hpp"
#include "tframe/transport.hpp"
