// Copyright 2026 The vandal-sentinel Authors.
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

#ifndef VSENTINEL_TIMESTAMP_H_
#define VSENTINEL_TIMESTAMP_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace vsentinel {

// Seconds since the Unix epoch, UTC.
using UnixSeconds = int64_t;

// Parses "YYYY-MM-DDTHH:MM:SSZ" (the MediaWiki API form). Throws
// Error(kMalformed) on anything else.
UnixSeconds ParseIsoTimestamp(std::string_view text);

std::string FormatIsoTimestamp(UnixSeconds seconds);

// Wall clock, for computed_at fields and manifests only.
UnixSeconds NowSeconds();

}  // namespace vsentinel

#endif  // VSENTINEL_TIMESTAMP_H_
