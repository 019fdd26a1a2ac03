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

#include "vsentinel/labels.h"

#include <fstream>

#include "vsentinel/error.h"
#include "vsentinel/file_util.h"

namespace vsentinel {

LabelStore::LabelStore(std::filesystem::path path, Clock clock)
    : path_(std::move(path)), clock_(std::move(clock)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  events_ = ParseLabelEvents(ReadFile(path_));
  for (size_t i = 0; i < events_.size(); ++i) by_rev_[events_[i].rev_id].push_back(i);
}

LabelEvent LabelStore::Append(const LabelRequest& request) {
  if (request.rev_id <= 0) throw Error(ErrorCode::kInvalidArgument, "rev_id must be positive");
  if (request.reviewer.empty()) throw Error(ErrorCode::kInvalidArgument, "reviewer is required");
  std::lock_guard lock(mu_);
  std::vector<size_t>& mine = by_rev_[request.rev_id];
  const auto count = static_cast<int64_t>(mine.size());
  if (request.seen_events < count && !request.confirm) {
    const LabelEvent& last = events_[mine.back()];
    throw Error(ErrorCode::kConflictingConcurrentLabel,
                "revision " + std::to_string(request.rev_id) + " was labeled " +
                    ReviewClassName(last.review_class) + " by " + last.reviewer);
  }
  LabelEvent event;
  event.rev_id = request.rev_id;
  event.review_class = request.review_class;
  event.reviewer = request.reviewer;
  event.labeled_at = clock_();
  // Keeps "latest by labeled_at" and "latest appended" the same event.
  if (!mine.empty()) event.labeled_at = std::max(event.labeled_at, events_[mine.back()].labeled_at);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    out << LabelEventToJson(event).dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "cannot append to " + path_.string());
  }
  mine.push_back(events_.size());
  events_.push_back(event);
  return event;
}

std::vector<LabelEvent> LabelStore::History() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::vector<LabelEvent> LabelStore::History(int64_t rev_id) const {
  std::lock_guard lock(mu_);
  std::vector<LabelEvent> out;
  if (auto it = by_rev_.find(rev_id); it != by_rev_.end()) {
    for (size_t i : it->second) out.push_back(events_[i]);
  }
  return out;
}

std::vector<LabelEvent> LabelStore::Latest() const {
  std::lock_guard lock(mu_);
  std::vector<LabelEvent> out;
  for (const auto& [rev, idx] : by_rev_) {
    if (!idx.empty()) out.push_back(events_[idx.back()]);
  }
  return out;
}

std::optional<LabelEvent> LabelStore::Latest(int64_t rev_id) const {
  std::lock_guard lock(mu_);
  auto it = by_rev_.find(rev_id);
  if (it == by_rev_.end() || it->second.empty()) return std::nullopt;
  return events_[it->second.back()];
}

int64_t LabelStore::EventCount(int64_t rev_id) const {
  std::lock_guard lock(mu_);
  auto it = by_rev_.find(rev_id);
  return it == by_rev_.end() ? 0 : static_cast<int64_t>(it->second.size());
}

std::string LabelStore::ToJsonl(const std::vector<LabelEvent>& events) {
  std::string out;
  for (const LabelEvent& e : events) out += LabelEventToJson(e).dump() + "\n";
  return out;
}

}  // namespace vsentinel
