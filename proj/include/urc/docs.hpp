// Copyright 2026 The urc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

namespace urc {

/// One catalog entry: a preset group, or a check that needs no preset.
struct PresetCatalogEntry {
  std::string name;
  /// The study the entry reproduces.
  std::string anchor;
  /// Registered preset names, empty for checks.
  std::vector<std::string> presets;
  /// Expected outcomes, with the thresholds the acceptance run applies.
  std::vector<std::string> expectations;
};

struct AcceptanceCriterion {
  int number = 0;
  std::string title;
  /// Name of the catalog entry the criterion exercises.
  std::string entry;
};

std::vector<PresetCatalogEntry> preset_catalog();
const std::vector<AcceptanceCriterion>& acceptance_criteria();

/// Markdown catalog built from the preset registry. Throws InvariantError when a
/// criterion names an unknown entry, or a preset is missing or listed twice.
std::string generate_preset_catalog();

}  // namespace urc
