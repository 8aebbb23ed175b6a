// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace scalefit::logging {

// Verbosity comes from the SCALEFIT_LOG environment variable:
// quiet|warn|info|debug (or 0..3). Default is warn.
enum class Level { kQuiet = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

Level level();

void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace scalefit::logging
