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

// Append-only log of reviewer labels. Each event is one JSONL line in the
// backing file; the latest event per revision wins on export.

#ifndef VSENTINEL_LABELS_H_
#define VSENTINEL_LABELS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vsentinel/corpus.h"

namespace vsentinel {

struct LabelRequest {
  int64_t rev_id = 0;
  ReviewClass review_class = ReviewClass::kGood;
  std::string reviewer;
  // Number of events for this revision the writer has seen. A writer that
  // has not seen every event must resubmit with `confirm` set.
  int64_t seen_events = 0;
  bool confirm = false;
};

class LabelStore {
 public:
  using Clock = std::function<UnixSeconds()>;

  // Empty path keeps the log in memory. Existing files are replayed.
  explicit LabelStore(std::filesystem::path path = {}, Clock clock = NowSeconds);

  // Throws Error(kConflictingConcurrentLabel) when the writer is behind.
  LabelEvent Append(const LabelRequest& request);

  std::vector<LabelEvent> History() const;
  std::vector<LabelEvent> History(int64_t rev_id) const;
  std::vector<LabelEvent> Latest() const;  // one per revision, by rev_id
  std::optional<LabelEvent> Latest(int64_t rev_id) const;
  int64_t EventCount(int64_t rev_id) const;

  static std::string ToJsonl(const std::vector<LabelEvent>& events);

 private:
  std::filesystem::path path_;
  Clock clock_;
  mutable std::mutex mu_;
  std::vector<LabelEvent> events_;
  std::map<int64_t, std::vector<size_t>> by_rev_;
};

}  // namespace vsentinel

#endif  // VSENTINEL_LABELS_H_
