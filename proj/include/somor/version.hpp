// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace somor {

inline constexpr const char kVersion[] = "0.1.0";

}  // namespace somor
