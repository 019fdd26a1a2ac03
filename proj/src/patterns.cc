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

#include "vsentinel/patterns.h"

#include <algorithm>
#include <sstream>

#include "vsentinel/error.h"
#include "vsentinel/file_util.h"

namespace vsentinel {

namespace {

// Items for major languages, used to recognise "language name" values.
constexpr const char* kLanguageItems[] = {
    "Q1860",   // English
    "Q188",    // German
    "Q150",    // French
    "Q1321",   // Spanish
    "Q652",    // Italian
    "Q5146",   // Portuguese
    "Q7737",   // Russian
    "Q5287",   // Japanese
    "Q7850",   // Chinese
    "Q13955",  // Arabic
    "Q7411",   // Dutch
    "Q809",    // Polish
    "Q9027",   // Swedish
    "Q256",    // Turkish
    "Q9176",   // Korean
    "Q9168",   // Persian
    "Q1568",   // Hindi
    "Q9288",   // Hebrew
    "Q9129",   // Greek
    "Q8798",   // Ukrainian
    "Q9056",   // Czech
    "Q9067",   // Hungarian
    "Q1412",   // Finnish
    "Q9035",   // Danish
    "Q9043",   // Norwegian
    "Q7913",   // Romanian
    "Q7918",   // Bulgarian
    "Q9299",   // Serbian
    "Q6654",   // Croatian
    "Q7026",   // Catalan
    "Q9199",   // Vietnamese
    "Q9240",   // Indonesian
    "Q9237",   // Malay
    "Q9217",   // Thai
    "Q9610",   // Bengali
    "Q1617",   // Urdu
    "Q5885",   // Tamil
    "Q8097",   // Telugu
    "Q397",    // Latin
    "Q143",    // Esperanto
    "Q9142",   // Irish
    "Q9309",   // Welsh
    "Q8752",   // Basque
    "Q9307",   // Galician
    "Q9072",   // Estonian
    "Q9078",   // Latvian
    "Q9083",   // Lithuanian
    "Q9058",   // Slovak
    "Q9063",   // Slovene
    "Q294",    // Icelandic
    "Q8748",   // Albanian
    "Q8785",   // Armenian
    "Q8108",   // Georgian
    "Q9292",   // Azerbaijani
    "Q9252",   // Kazakh
    "Q9264",   // Uzbek
    "Q7838",   // Swahili
    "Q14196",  // Afrikaans
    "Q10179",  // Zulu
    "Q28244",  // Amharic
    "Q34057",  // Tagalog
};

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::set<std::string> SplitList(std::string_view value) {
  std::set<std::string> out;
  std::string token;
  for (char c : value) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) out.insert(std::move(token));
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) out.insert(std::move(token));
  return out;
}

std::string JoinList(const std::set<std::string>& items) {
  std::string out;
  for (const std::string& s : items) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

bool Intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::any_of(a.begin(), a.end(), [&](const auto& x) { return b.contains(x); });
}

}  // namespace

const char* EditKindName(EditKind kind) {
  switch (kind) {
    case EditKind::kClient: return "client";
    case EditKind::kMerge: return "merge";
    case EditKind::kRevertish: return "revertish";
    case EditKind::kRegular: return "regular";
    case EditKind::kCreation: return "creation";
  }
  return "regular";
}

EditKind ParseEditKind(std::string_view name) {
  if (name == "client") return EditKind::kClient;
  if (name == "merge") return EditKind::kMerge;
  if (name == "revertish") return EditKind::kRevertish;
  if (name == "regular") return EditKind::kRegular;
  if (name == "creation") return EditKind::kCreation;
  throw Error(ErrorCode::kConfig, "unknown edit kind '" + std::string(name) + "'");
}

PatternConfig PatternConfig::Defaults() {
  PatternConfig c;
  // "sysop" appears twice in the source list; a set keeps one.
  c.trusted_groups = {"sysop",           "checkuser", "flood",
                      "ipblock-exempt",  "oversight", "property-creator",
                      "rollbacker",      "steward",   "translationadmin",
                      "wikidata-staff"};
  c.advanced_groups = {"checkuser", "bureaucrat", "oversight"};
  c.curator_groups = {"rollbacker", "abusefilter", "autopatrolled", "reviewer"};
  c.admin_groups = {"sysop"};
  c.bot_groups = {"bot"};
  c.language_item_ids.insert(std::begin(kLanguageItems), std::end(kLanguageItems));
  c.AddCommentRule(EditKind::kClient, "clientsitelink");
  c.AddCommentRule(EditKind::kMerge, "wbmergeitems");
  c.AddCommentRule(EditKind::kRevertish,
                   R"(Undid revision|Reverted|Restored|wbsetentity.*restore|/\* undo:|/\* restore:)");
  c.AddCommentRule(EditKind::kCreation, "wbeditentity-create");
  return c;
}

void PatternConfig::AddCommentRule(EditKind kind, const std::string& pattern) {
  try {
    comment_rules.push_back(
        {kind, pattern, std::regex(pattern, std::regex::ECMAScript | std::regex::optimize)});
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kConfig, "bad comment pattern '" + pattern + "': " + e.what());
  }
}

PatternConfig PatternConfig::Parse(std::string_view text) {
  PatternConfig c = Defaults();
  bool replaced_rules = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig, "expected 'key = value'",
                  "line " + std::to_string(line_no));
    }
    const std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    const std::string value = Trim(std::string_view(trimmed).substr(eq + 1));
    PropertyBindings& b = c.bindings;
    if (key == "feature_schema") {
      c.feature_schema = value;
    } else if (key == "property.gender") { b.gender = value;
    } else if (key == "property.citizenship") { b.citizenship = value;
    } else if (key == "property.sports_team") { b.sports_team = value;
    } else if (key == "property.date_of_birth") { b.date_of_birth = value;
    } else if (key == "property.image") { b.image = value;
    } else if (key == "property.signature") { b.signature = value;
    } else if (key == "property.commons_category") { b.commons_category = value;
    } else if (key == "property.official_website") { b.official_website = value;
    } else if (key == "property.instance_of") { b.instance_of = value;
    } else if (key == "property.date_of_death") { b.date_of_death = value;
    } else if (key == "item.human") { b.human = value;
    } else if (key == "groups.trusted") { c.trusted_groups = SplitList(value);
    } else if (key == "groups.advanced") { c.advanced_groups = SplitList(value);
    } else if (key == "groups.curator") { c.curator_groups = SplitList(value);
    } else if (key == "groups.admin") { c.admin_groups = SplitList(value);
    } else if (key == "groups.bot") { c.bot_groups = SplitList(value);
    } else if (key == "languages") {
      c.language_item_ids = SplitList(value);
    } else if (key.starts_with("comment.")) {
      if (!replaced_rules) {
        c.comment_rules.clear();
        replaced_rules = true;
      }
      c.AddCommentRule(ParseEditKind(key.substr(8)), value);
    } else {
      throw Error(ErrorCode::kConfig, "unknown key '" + key + "'",
                  "line " + std::to_string(line_no));
    }
  }
  return c;
}

PatternConfig PatternConfig::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

std::string PatternConfig::ToText() const {
  std::ostringstream out;
  const PropertyBindings& b = bindings;
  out << "feature_schema = " << feature_schema << "\n"
      << "property.gender = " << b.gender << "\n"
      << "property.citizenship = " << b.citizenship << "\n"
      << "property.sports_team = " << b.sports_team << "\n"
      << "property.date_of_birth = " << b.date_of_birth << "\n"
      << "property.image = " << b.image << "\n"
      << "property.signature = " << b.signature << "\n"
      << "property.commons_category = " << b.commons_category << "\n"
      << "property.official_website = " << b.official_website << "\n"
      << "property.instance_of = " << b.instance_of << "\n"
      << "property.date_of_death = " << b.date_of_death << "\n"
      << "item.human = " << b.human << "\n"
      << "groups.trusted = " << JoinList(trusted_groups) << "\n"
      << "groups.advanced = " << JoinList(advanced_groups) << "\n"
      << "groups.curator = " << JoinList(curator_groups) << "\n"
      << "groups.admin = " << JoinList(admin_groups) << "\n"
      << "groups.bot = " << JoinList(bot_groups) << "\n"
      << "languages = " << JoinList(language_item_ids) << "\n";
  for (const CommentRule& rule : comment_rules) {
    out << "comment." << EditKindName(rule.kind) << " = " << rule.pattern << "\n";
  }
  return out.str();
}

bool PatternConfig::IsTrusted(const UserInfo& user) const {
  return Intersects(user.groups, trusted_groups);
}

bool PatternConfig::IsBot(const UserInfo& user) const {
  return user.is_bot || Intersects(user.groups, bot_groups);
}

EditKind ClassifyComment(std::string_view comment, const EditMeta& meta,
                         const PatternConfig& config) {
  for (const CommentRule& rule : config.comment_rules) {
    if (std::regex_search(comment.begin(), comment.end(), rule.regex)) {
      return rule.kind;
    }
  }
  return meta.parent_rev_id == 0 ? EditKind::kCreation : EditKind::kRegular;
}

}  // namespace vsentinel
