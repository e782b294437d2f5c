#pragma once

#include "qubus/drive.hpp"
#include "qubus/errors.hpp"
#include "qubus/execute.hpp"
#include "qubus/fock.hpp"
#include "qubus/gates.hpp"
#include "qubus/hybrid_state.hpp"
#include "qubus/loss.hpp"
#include "qubus/metrics.hpp"
#include "qubus/phase_space.hpp"
#include "qubus/schedule.hpp"
#include "qubus/sequence.hpp"
#include "qubus/text.hpp"
