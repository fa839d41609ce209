/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <functional>
#include <string>

namespace aemos {

/// Non-fatal diagnostics.  The default handler prints to stderr; tests and
/// the CLI may install their own.  Handlers must be thread-safe.
using WarningHandler = std::function<void(const std::string&)>;

void warn(const std::string& message);

/// Installs a handler and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace aemos
