// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

// Umbrella header: pulls in the whole library.

#pragma once

#include "somor/aaa.hpp"
#include "somor/balance.hpp"
#include "somor/coefficient.hpp"
#include "somor/config.hpp"
#include "somor/error.hpp"
#include "somor/interp.hpp"
#include "somor/lyapunov.hpp"
#include "somor/manifest.hpp"
#include "somor/metrics.hpp"
#include "somor/mmio.hpp"
#include "somor/numerics.hpp"
#include "somor/reduce.hpp"
#include "somor/runner.hpp"
#include "somor/select.hpp"
#include "somor/soar.hpp"
#include "somor/synthetic.hpp"
#include "somor/system.hpp"
#include "somor/version.hpp"
