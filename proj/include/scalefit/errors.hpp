// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace scalefit {

// Base class for all toolkit failures. ParseError marks malformed input
// (files, streams, CLI arguments) and maps to exit code 1; every other
// Error is an analysis-stage failure and maps to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace scalefit
