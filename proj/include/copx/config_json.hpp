// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#pragma once

#include "copx/scenario.hpp"

#include "json.hpp"

#include <string>

namespace copx
{

/// Snake-case JSON document; every field is written.
nlohmann::json to_json(const ScenarioConfig& config);

/// Missing fields keep their defaults; unknown fields and wrong types throw
/// ConfigError. The result is validated.
ScenarioConfig config_from_json(const nlohmann::json& doc);

std::string dump_config(const ScenarioConfig& config);
ScenarioConfig parse_config(const std::string& text);

ScenarioConfig load_config(const std::string& path);

/// FNV-1a 64 over the canonical dump, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

} // namespace copx
