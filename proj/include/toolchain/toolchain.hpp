#pragma once

#include "toolchain/action.hpp"
#include "toolchain/cost.hpp"
#include "toolchain/env.hpp"
#include "toolchain/errors.hpp"
#include "toolchain/harness.hpp"
#include "toolchain/http_backend.hpp"
#include "toolchain/lcs.hpp"
#include "toolchain/memory.hpp"
#include "toolchain/proposer.hpp"
#include "toolchain/rng.hpp"
#include "toolchain/scripted.hpp"
#include "toolchain/search.hpp"
#include "toolchain/suite.hpp"
#include "toolchain/task.hpp"
#include "toolchain/trace.hpp"
#include "toolchain/tree.hpp"
