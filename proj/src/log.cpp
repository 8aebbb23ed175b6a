// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "scalefit/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace scalefit::logging {

namespace {

Level parse_level() {
    const char* env = std::getenv("SCALEFIT_LOG");
    if (env == nullptr) return Level::kWarn;
    const std::string v(env);
    if (v == "quiet" || v == "0") return Level::kQuiet;
    if (v == "warn" || v == "1") return Level::kWarn;
    if (v == "info" || v == "2") return Level::kInfo;
    if (v == "debug" || v == "3") return Level::kDebug;
    return Level::kWarn;
}

}  // namespace

Level level() {
    static const Level lvl = parse_level();
    return lvl;
}

void warn(const std::string& msg) {
    if (level() >= Level::kWarn) std::cerr << "[warn] " << msg << "\n";
}

void info(const std::string& msg) {
    if (level() >= Level::kInfo) std::cerr << "[info] " << msg << "\n";
}

void debug(const std::string& msg) {
    if (level() >= Level::kDebug) std::cerr << "[debug] " << msg << "\n";
}

}  // namespace scalefit::logging
