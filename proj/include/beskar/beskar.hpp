#pragma once

#include "beskar/agg/config.hpp"
#include "beskar/agg/encoding.hpp"
#include "beskar/agg/messages.hpp"
#include "beskar/agg/protocol.hpp"
#include "beskar/agg/shamir.hpp"
#include "beskar/common/bytes.hpp"
#include "beskar/common/errors.hpp"
#include "beskar/common/op_counts.hpp"
#include "beskar/common/timing.hpp"
#include "beskar/dp/dp.hpp"
#include "beskar/kem/kyber.hpp"
#include "beskar/lattice/modarith.hpp"
#include "beskar/lattice/ntt.hpp"
#include "beskar/lattice/params.hpp"
#include "beskar/lattice/poly.hpp"
#include "beskar/lattice/rounding.hpp"
#include "beskar/lattice/sampling.hpp"
#include "beskar/mask/prf.hpp"
#include "beskar/sig/dilithium.hpp"
#include "beskar/sig/precompute.hpp"
#include "beskar/sim/config.hpp"
#include "beskar/sim/cost_model.hpp"
#include "beskar/sim/events.hpp"
#include "beskar/sim/metrics.hpp"
#include "beskar/sim/simulation.hpp"
#include "beskar/sponge/ascon.hpp"
