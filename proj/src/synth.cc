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

#include "vsentinel/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <optional>

#include "vsentinel/error.h"
#include "vsentinel/file_util.h"
#include "vsentinel/random.h"

namespace vsentinel {

using nlohmann::json;

const char* SignalPlacementName(SignalPlacement s) {
  switch (s) {
    case SignalPlacement::kUser: return "user";
    case SignalPlacement::kContent: return "content";
    case SignalPlacement::kNone: return "none";
  }
  return "user";
}

SignalPlacement ParseSignalPlacement(std::string_view name) {
  if (name == "user") return SignalPlacement::kUser;
  if (name == "content") return SignalPlacement::kContent;
  if (name == "none") return SignalPlacement::kNone;
  throw Error(ErrorCode::kInvalidSpec, "signal must be user, content or none");
}

void SynthSpec::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidSpec, msg); };
  if (n < 1) fail("n must be >= 1");
  if (!(prevalence > 0.0 && prevalence < 1.0)) fail("prevalence must be in (0, 1)");
  if (prevalence >= 0.5) fail("prevalence must be below 0.5: every vandal edit is reverted");
  if (items < 0) fail("items must be >= 0");
  for (double share : {trusted_share, client_share, merge_share, creation_share, bot_share,
                       goodfaith_revert_rate}) {
    if (!(share >= 0.0 && share <= 1.0)) fail("shares must be in [0, 1]");
  }
  if (trusted_share + client_share + merge_share + creation_share > 1.0) {
    fail("edit shares sum above 1");
  }
}

json SynthSpec::ToJson() const {
  return {{"version", kSynthVersion},
          {"n", n},
          {"prevalence", prevalence},
          {"signal", SignalPlacementName(signal)},
          {"seed", seed},
          {"items", items},
          {"trusted_share", trusted_share},
          {"client_share", client_share},
          {"merge_share", merge_share},
          {"creation_share", creation_share},
          {"bot_share", bot_share},
          {"goodfaith_revert_rate", goodfaith_revert_rate}};
}

SynthSpec SynthSpec::FromJson(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidSpec, "spec must be an object");
  if (doc.contains("version") && doc["version"] != kSynthVersion) {
    throw Error(ErrorCode::kInvalidSpec, "unsupported generator version");
  }
  SynthSpec s;
  try {
    s.n = doc.value("n", s.n);
    s.prevalence = doc.value("prevalence", s.prevalence);
    if (doc.contains("signal")) s.signal = ParseSignalPlacement(doc["signal"].get<std::string>());
    s.seed = doc.value("seed", s.seed);
    s.items = doc.value("items", s.items);
    s.trusted_share = doc.value("trusted_share", s.trusted_share);
    s.client_share = doc.value("client_share", s.client_share);
    s.merge_share = doc.value("merge_share", s.merge_share);
    s.creation_share = doc.value("creation_share", s.creation_share);
    s.bot_share = doc.value("bot_share", s.bot_share);
    s.goodfaith_revert_rate = doc.value("goodfaith_revert_rate", s.goodfaith_revert_rate);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidSpec, e.what());
  }
  s.Validate();
  return s;
}

std::string SynthPropertiesText() {
  return "@schema vs-features/1\n"
         "P17 wikibase-item\n"
         "P18 commonsMedia\n"
         "P21 wikibase-item\n"
         "P27 wikibase-item\n"
         "P31 wikibase-item\n"
         "P54 wikibase-item\n"
         "P106 wikibase-item\n"
         "P109 commonsMedia\n"
         "P143 wikibase-item\n"
         "P214 external-id\n"
         "P227 external-id\n"
         "P373 string\n"
         "P569 time\n"
         "P570 time\n"
         "P580 time\n"
         "P585 time\n"
         "P625 globe-coordinate\n"
         "P646 external-id\n"
         "P813 time\n"
         "P854 url\n"
         "P856 url\n"
         "P1082 quantity\n"
         "P1412 wikibase-item\n";
}

namespace {

constexpr const char* kFirstNames[] = {
    "Anna", "Ben", "Carla", "David", "Elena", "Farid", "Greta", "Hiro", "Ines", "Jonas",
    "Kofi", "Lena", "Marco", "Nadia", "Oskar", "Priya", "Quentin", "Rosa", "Sven", "Tariq",
    "Ursula", "Viktor", "Wanda", "Xavier", "Yusuf", "Zofia"};
constexpr const char* kLastNames[] = {
    "Albrecht", "Barros", "Chen", "Dubois", "Eriksen", "Fischer", "Garcia", "Haddad",
    "Ivanova", "Jensen", "Kowalski", "Lindqvist", "Moreau", "Nakamura", "Okafor", "Petrov",
    "Quinn", "Rossi", "Schmidt", "Tanaka", "Usman", "Varga", "Weber", "Yilmaz"};
constexpr const char* kPlaces[] = {
    "Alder", "Birch", "Cedar", "Dun", "Elm", "Fen", "Glen", "Holm", "Ivy", "Juniper",
    "Kirk", "Lark", "Moor", "Nether", "Oak", "Pine", "Quarry", "Rye", "Stone", "Thorn"};
constexpr const char* kPlaceSuffix[] = {"ford", "ton", "by", "wick", "stead", "field",
                                        "mouth", "dale", "bridge", "haven"};
constexpr const char* kLanguages[] = {"de", "fr", "es", "it", "nl", "pl", "sv", "ru", "ja",
                                      "pt", "fi", "cs"};
constexpr const char* kWikis[] = {"dewiki", "frwiki", "eswiki", "itwiki", "nlwiki",
                                  "plwiki", "svwiki", "ruwiki", "jawiki", "ptwiki"};
constexpr const char* kCountries[] = {"Q183", "Q142", "Q29", "Q38", "Q55", "Q36",
                                      "Q34", "Q159", "Q17", "Q45", "Q33", "Q213"};
constexpr const char* kOccupations[] = {"Q82955", "Q36180", "Q937857", "Q33999", "Q1650915",
                                        "Q170790", "Q39631", "Q177220", "Q40348", "Q1622272"};
constexpr const char* kTeams[] = {"Q9616", "Q15789", "Q18656", "Q1422", "Q8682", "Q7156"};
constexpr const char* kDescriptionsHuman[] = {"politician", "writer", "footballer", "actor",
                                              "physicist", "painter", "composer", "architect"};
constexpr const char* kJunk[] = {"lol", "poop", "is the best", "hahaha", "idiot", "fake",
                                 "asdfgh", "who cares", "my friend", "xD"};
constexpr const char* kSpamHosts[] = {"cheap-pills.example", "best-casino.example",
                                      "free-prizes.example", "clickbait.example"};
constexpr const char* kLanguageItems[] = {"Q1860", "Q188", "Q150", "Q1321", "Q652", "Q7737"};
constexpr const char* kMale = "Q6581097";
constexpr const char* kFemale = "Q6581072";

template <typename T, size_t N>
const T& Choose(Rng& rng, const T (&items)[N]) {
  return items[rng.Below(N)];
}

std::string TimeValue(int year, int month, int day) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "+%04d-%02d-%02dT00:00:00Z", year, month, day);
  return buf;
}

enum class Actor { kAnonymous, kNewAccount, kEstablished, kTrusted };

struct Item {
  EntityRevision state;
  std::string json;
  int64_t last_rev = 0;
  bool human = false;
  bool locked = false;  // waiting for a revert
};

struct PendingRevert {
  UnixSeconds due;
  size_t item;
  std::string restored_json;
  EntityRevision restored;
  std::string reverted_user;
  int64_t restored_rev;
};

class Generator {
 public:
  explicit Generator(const SynthSpec& spec) : spec_(spec), rng_(DeriveSeed(spec.seed, 11)) {}

  SynthOutput Run() {
    clock_ = ParseIsoTimestamp("2015-10-01T00:00:00Z");
    MakeUserPools();
    const int64_t n_items = spec_.items > 0 ? spec_.items : std::max<int64_t>(10, spec_.n / 25);
    for (int64_t i = 0; i < n_items; ++i) CreateItem(bot_, /*counted=*/false);

    const double q = spec_.prevalence / (1.0 - spec_.prevalence);
    int64_t records = 0;
    while (records < spec_.n) {
      Tick(20, 90);
      FlushDue(false);
      if (rng_.Bernoulli(spec_.bot_share)) BotEdit();
      const int64_t remaining = spec_.n - records;
      if (remaining >= 2 && rng_.Bernoulli(q)) {
        if (VandalEvent()) {
          records += 2;
          continue;
        }
      }
      records += NormalEvent(remaining);
    }
    FlushDue(true);
    return std::move(out_);
  }

 private:
  // --- users ---------------------------------------------------------------

  void MakeUserPools() {
    bot_.name = "HarvestBot";
    bot_.is_bot = true;
    bot_.groups = {"bot", "autoconfirmed"};
    bot_.registration = clock_ - 3 * 365 * 86400;
    out_.users[bot_.name] = bot_;

    static constexpr const char* kTrustedSets[][3] = {
        {"sysop", "rollbacker", "autoconfirmed"},
        {"rollbacker", "autoconfirmed", ""},
        {"sysop", "bureaucrat", "autoconfirmed"},
        {"property-creator", "autoconfirmed", ""},
        {"ipblock-exempt", "autoconfirmed", ""},
        {"translationadmin", "autoconfirmed", ""},
        {"wikidata-staff", "autoconfirmed", ""},
        {"checkuser", "sysop", "autoconfirmed"},
        {"oversight", "rollbacker", "autoconfirmed"},
        {"steward", "autoconfirmed", ""},
        {"flood", "autoconfirmed", ""},
    };
    for (int i = 0; i < 40; ++i) {
      UserInfo u;
      u.name = "Curator" + std::to_string(i + 1);
      for (const char* g : kTrustedSets[i % std::size(kTrustedSets)]) {
        if (*g) u.groups.insert(g);
      }
      u.registration = clock_ - rng_.Range(400, 3000) * 86400;
      out_.users[u.name] = u;
      trusted_.push_back(u);
    }
    const int64_t n_editors = std::max<int64_t>(50, spec_.n / 15);
    for (int64_t i = 0; i < n_editors; ++i) {
      UserInfo u;
      u.name = std::string(Choose(rng_, kFirstNames)) + "Edits" + std::to_string(i + 1);
      u.groups.insert("autoconfirmed");
      if (rng_.Bernoulli(0.15)) u.groups.insert("autopatrolled");
      if (rng_.Bernoulli(0.03)) u.groups.insert("reviewer");
      u.registration = clock_ - rng_.Range(40, 3000) * 86400;
      out_.users[u.name] = u;
      established_.push_back(u);
    }
  }

  UserInfo Anonymous() {
    UserInfo u;
    if (rng_.Bernoulli(0.2)) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "2001:db8:%x:%x::%x",
                    static_cast<unsigned>(rng_.Below(0xffff)),
                    static_cast<unsigned>(rng_.Below(0xffff)),
                    static_cast<unsigned>(rng_.Below(0xffff) + 1));
      u.name = buf;
    } else {
      u.name = std::to_string(rng_.Range(11, 223)) + "." + std::to_string(rng_.Below(256)) +
               "." + std::to_string(rng_.Below(256)) + "." +
               std::to_string(rng_.Range(1, 254));
    }
    u.is_anonymous = true;
    return u;
  }

  UserInfo NewAccount() {
    UserInfo u;
    u.name = std::string(Choose(rng_, kLastNames)) + std::to_string(rng_.Range(10, 99999)) +
             "_" + std::to_string(++counter_);
    u.registration = clock_ - rng_.Range(60, 4 * 86400);
    out_.users[u.name] = u;
    return u;
  }

  UserInfo Established() {
    return established_[rng_.Below(established_.size())];
  }

  UserInfo Trusted() { return trusted_[rng_.Below(trusted_.size())]; }

  UserInfo Pick(double anon, double fresh) {
    const double u = rng_.Uniform();
    if (u < anon) return Anonymous();
    if (u < anon + fresh) return NewAccount();
    return Established();
  }

  UserInfo GoodUser() { return Pick(0.08, 0.05); }

  UserInfo VandalUser() {
    if (spec_.signal != SignalPlacement::kUser) return GoodUser();
    const double u = rng_.Uniform();
    if (u < 0.70) return Anonymous();
    if (u < 0.92) return NewAccount();
    UserInfo v = NewAccount();  // an account that has been around a while
    v.registration = clock_ - rng_.Range(30, 700) * 86400;
    out_.users[v.name] = v;
    return v;
  }

  // --- entity content ------------------------------------------------------

  std::string Fresh() { return std::to_string(++counter_); }

  static Statement Stmt(const std::string& pid, SnakValue v) {
    Statement s;
    s.property = pid;
    s.value = std::move(v);
    return s;
  }

  ReferenceGroup Reference() {
    if (rng_.Bernoulli(0.5)) return {{"P143", SnakValue::Item("Q328")}};
    return {{"P854", SnakValue::Url("https://news.example.org/article/" + Fresh())},
            {"P813", SnakValue::Time(TimeValue(2015, static_cast<int>(rng_.Range(1, 9)),
                                               static_cast<int>(rng_.Range(1, 28))))}};
  }

  void Add(EntityRevision& e, Statement s, bool referenced) {
    if (referenced) s.references.push_back(Reference());
    e.statements[s.property].push_back(std::move(s));
  }

  EntityRevision NewEntity(bool human, const std::string& qid) {
    EntityRevision e;
    e.item_id = qid;
    if (human) {
      const std::string name = std::string(Choose(rng_, kFirstNames)) + " " +
                               Choose(rng_, kLastNames);
      e.labels["en"] = name;
      for (int k = 0, m = static_cast<int>(rng_.Range(0, 3)); k < m; ++k) {
        e.labels[Choose(rng_, kLanguages)] = name;
      }
      e.descriptions["en"] = std::string("German ") + Choose(rng_, kDescriptionsHuman);
      Add(e, Stmt("P31", SnakValue::Item("Q5")), false);
      Add(e, Stmt("P21", SnakValue::Item(rng_.Bernoulli(0.5) ? kMale : kFemale)), true);
      Add(e, Stmt("P27", SnakValue::Item(Choose(rng_, kCountries))), rng_.Bernoulli(0.5));
      const int year = static_cast<int>(rng_.Range(1850, 1995));
      Add(e, Stmt("P569", SnakValue::Time(TimeValue(year, static_cast<int>(rng_.Range(1, 12)),
                                                    static_cast<int>(rng_.Range(1, 28))))),
          true);
      if (year < 1940 || rng_.Bernoulli(0.1)) {
        Add(e, Stmt("P570", SnakValue::Time(TimeValue(year + static_cast<int>(rng_.Range(30, 80)),
                                                      1, 1))),
            true);
      }
      Add(e, Stmt("P106", SnakValue::Item(Choose(rng_, kOccupations))), false);
      if (rng_.Bernoulli(0.5)) {
        Add(e, Stmt("P18", SnakValue::String(name + " " + Fresh() + ".jpg")), false);
      }
      if (rng_.Bernoulli(0.6)) {
        Add(e, Stmt("P214", SnakValue::ExternalId(std::to_string(rng_.Range(1000000, 9999999)))),
            false);
      }
      e.sitelinks["enwiki"] = {"enwiki", name, {}};
    } else {
      const std::string name = std::string(Choose(rng_, kPlaces)) + Choose(rng_, kPlaceSuffix);
      e.labels["en"] = name;
      for (int k = 0, m = static_cast<int>(rng_.Range(1, 4)); k < m; ++k) {
        e.labels[Choose(rng_, kLanguages)] = name;
      }
      e.descriptions["en"] = "town";
      Add(e, Stmt("P31", SnakValue::Item("Q3957")), false);
      Add(e, Stmt("P17", SnakValue::Item(Choose(rng_, kCountries))), true);
      Statement pop = Stmt("P1082", SnakValue::Quantity("+" + std::to_string(rng_.Range(500, 90000))));
      pop.qualifiers.push_back({"P585", SnakValue::Time(TimeValue(2011, 1, 1))});
      Add(e, std::move(pop), true);
      Add(e, Stmt("P625", SnakValue::Coordinate(
                              std::round(rng_.Uniform() * 1200000.0) / 10000.0 - 60.0,
                              std::round(rng_.Uniform() * 3600000.0) / 10000.0 - 180.0)),
          false);
      if (rng_.Bernoulli(0.4)) {
        Add(e, Stmt("P856", SnakValue::Url("http://www." + name + ".example.org/")), false);
      }
      if (rng_.Bernoulli(0.5)) Add(e, Stmt("P373", SnakValue::String(name)), false);
      e.sitelinks["enwiki"] = {"enwiki", name, {}};
    }
    for (int k = 0, m = static_cast<int>(rng_.Range(0, 2)); k < m; ++k) {
      const char* wiki = Choose(rng_, kWikis);
      e.sitelinks[wiki] = {wiki, e.labels["en"], {}};
    }
    return e;
  }

  bool Has(const EntityRevision& e, const std::string& pid) {
    auto it = e.statements.find(pid);
    return it != e.statements.end() && !it->second.empty();
  }

  // A good-faith change. Never restores an earlier state: every value added
  // or rewritten carries fresh text.
  std::string GoodChange(Item& item, EntityRevision& e, bool trusted) {
    const double u = rng_.Uniform();
    const std::string lang = Choose(rng_, kLanguages);
    if (u < 0.14) {
      e.labels[lang] = e.labels["en"] + " (" + Fresh() + ")";
      return "/* wbsetlabel-add:1|" + lang + " */ " + e.labels[lang];
    }
    if (u < 0.20 && !e.labels.empty()) {
      e.labels[lang] = e.labels["en"] + " " + Fresh();
      return "/* wbsetlabel-set:1|" + lang + " */ " + e.labels[lang];
    }
    if (u < 0.30) {
      const std::string l = rng_.Bernoulli(0.2) ? "en" : lang;
      e.descriptions[l] = (item.human ? std::string(Choose(rng_, kDescriptionsHuman))
                                      : std::string("settlement")) + " " + Fresh();
      return "/* wbsetdescription-set:1|" + l + " */ " + e.descriptions[l];
    }
    if (u < 0.55) return AddStatement(item, e);
    if (u < 0.63) {
      auto& list = e.statements.begin()->second;
      list[rng_.Below(list.size())].references.push_back(Reference());
      return "/* wbsetreference-add:2| */ [[Property:" + e.statements.begin()->first + "]]";
    }
    if (u < 0.68) {
      auto it = std::next(e.statements.begin(), static_cast<ptrdiff_t>(rng_.Below(e.statements.size())));
      it->second.front().qualifiers.push_back(
          {"P580", SnakValue::Time(TimeValue(static_cast<int>(rng_.Range(1900, 2015)), 1, 1))});
      return "/* wbsetqualifier-add:1| */ [[Property:" + it->first + "]]";
    }
    if (u < 0.76) {
      e.aliases[lang].push_back(e.labels["en"] + " " + Fresh());
      return "/* wbsetaliases-add:1|" + lang + " */";
    }
    if (u < 0.83) {
      const char* wiki = Choose(rng_, kWikis);
      e.sitelinks[wiki] = {wiki, e.labels["en"] + " " + Fresh(), {}};
      if (rng_.Bernoulli(0.1)) e.sitelinks[wiki].badges.push_back("Q17437796");
      return std::string("/* wbsetsitelink-add:1|") + wiki + " */";
    }
    if (u < 0.88 && !item.human && Has(e, "P1082")) {
      Statement pop = Stmt("P1082", SnakValue::Quantity("+" + std::to_string(rng_.Range(500, 90000)) +
                                                        "." + Fresh()));
      pop.qualifiers.push_back({"P585", SnakValue::Time(TimeValue(2015, 1, 1))});
      Add(e, std::move(pop), true);
      return "/* wbsetclaim-create:2||1 */ [[Property:P1082]]";
    }
    if (u < 0.93) {
      // Sensitive fields also get legitimate fixes.
      if (item.human && Has(e, "P569") && !trusted) {
        e.statements["P569"].front().references.push_back(Reference());
        return "/* wbsetreference-add:2| */ [[Property:P569]]";
      }
      e.labels["en"] = e.labels["en"] + " " + Fresh();
      return "/* wbsetlabel-set:1|en */ " + e.labels["en"];
    }
    e.descriptions[lang] = "beschreibung " + Fresh();
    return "/* wbsetdescription-add:1|" + lang + " */";
  }

  std::string AddStatement(Item& item, EntityRevision& e) {
    const double u = rng_.Uniform();
    if (item.human) {
      if (u < 0.2) {
        Add(e, Stmt("P106", SnakValue::Item(Choose(rng_, kOccupations))), rng_.Bernoulli(0.6));
        return "/* wbsetclaim-create:2||1 */ [[Property:P106]]";
      }
      if (u < 0.3) {
        Add(e, Stmt("P1412", SnakValue::Item(Choose(rng_, kLanguageItems))), false);
        return "/* wbsetclaim-create:2||1 */ [[Property:P1412]]";
      }
      if (u < 0.4 && !Has(e, "P18")) {
        Add(e, Stmt("P18", SnakValue::String(e.labels["en"] + " " + Fresh() + ".jpg")), false);
        return "/* wbsetclaim-create:2||1 */ [[Property:P18]]";
      }
      if (u < 0.48) {
        Add(e, Stmt("P54", SnakValue::Item(Choose(rng_, kTeams))), true);
        return "/* wbsetclaim-create:2||1 */ [[Property:P54]]";
      }
      if (u < 0.55 && !Has(e, "P27")) {
        Add(e, Stmt("P27", SnakValue::Item(Choose(rng_, kCountries))), true);
        return "/* wbsetclaim-create:2||1 */ [[Property:P27]]";
      }
      if (u < 0.6) {
        Add(e, Stmt("P109", SnakValue::String("Signature " + Fresh() + ".svg")), false);
        return "/* wbsetclaim-create:2||1 */ [[Property:P109]]";
      }
    } else {
      if (u < 0.2 && !Has(e, "P856")) {
        Add(e, Stmt("P856", SnakValue::Url("https://www.town" + Fresh() + ".example.org/")),
            false);
        return "/* wbsetclaim-create:2||1 */ [[Property:P856]]";
      }
      if (u < 0.35 && !Has(e, "P373")) {
        Add(e, Stmt("P373", SnakValue::String(e.labels["en"] + " " + Fresh())), false);
        return "/* wbsetclaim-create:2||1 */ [[Property:P373]]";
      }
      if (u < 0.45) {
        Add(e, Stmt("P18", SnakValue::String(e.labels["en"] + " view " + Fresh() + ".jpg")), false);
        return "/* wbsetclaim-create:2||1 */ [[Property:P18]]";
      }
    }
    const bool viaf = rng_.Bernoulli(0.5);
    Add(e, Stmt(viaf ? "P227" : "P646",
                SnakValue::ExternalId(viaf ? std::to_string(rng_.Range(100000, 999999)) + Fresh()
                                           : "/m/0" + Fresh())),
        false);
    return std::string("/* wbsetclaim-create:2||1 */ [[Property:") + (viaf ? "P227" : "P646") + "]]";
  }

  // A planted vandalism pattern; falls back to a junk English label.
  std::string VandalChange(Item& item, EntityRevision& e) {
    const double u = rng_.Uniform();
    const std::string junk = std::string(Choose(rng_, kJunk)) + " " + Fresh();
    if (u < 0.20) {
      e.labels["en"] = rng_.Bernoulli(0.5) ? junk : e.labels["en"] + " " + junk;
      return "/* wbsetlabel-set:1|en */ " + e.labels["en"];
    }
    if (u < 0.28 && e.labels.contains("en")) {
      e.labels.erase("en");
      return "/* wbsetlabel-remove:1|en */";
    }
    if (u < 0.42) {
      e.descriptions["en"] = junk;
      return "/* wbsetdescription-set:1|en */ " + junk;
    }
    if (u < 0.52 && item.human && Has(e, "P21")) {
      Statement& g = e.statements["P21"].front();
      g.value = SnakValue::Item(g.value.text == kMale ? kFemale : kMale);
      return "/* wbsetclaim-update:2||1 */ [[Property:P21]]";
    }
    if (u < 0.60 && item.human && Has(e, "P569")) {
      e.statements["P569"].front().value = SnakValue::Time(
          TimeValue(static_cast<int>(rng_.Range(1000, 2014)), static_cast<int>(rng_.Range(1, 12)),
                    static_cast<int>(rng_.Range(1, 28))));
      return "/* wbsetclaim-update:2||1 */ [[Property:P569]]";
    }
    if (u < 0.66) {
      if (Has(e, "P18")) {
        e.statements["P18"].front().value = SnakValue::String("Funny " + Fresh() + ".jpg");
      } else {
        Add(e, Stmt("P18", SnakValue::String("Funny " + Fresh() + ".jpg")), false);
      }
      return "/* wbsetclaim-update:2||1 */ [[Property:P18]]";
    }
    if (u < 0.72) {
      const std::string url = std::string("http://") + Choose(rng_, kSpamHosts) + "/" + Fresh();
      if (Has(e, "P856")) {
        e.statements["P856"].front().value = SnakValue::Url(url);
      } else {
        Add(e, Stmt("P856", SnakValue::Url(url)), false);
      }
      return "/* wbsetclaim-update:2||1 */ [[Property:P856]]";
    }
    if (u < 0.80) {
      for (int k = 0, m = static_cast<int>(rng_.Range(2, 5)); k < m; ++k) {
        Add(e, Stmt("P31", SnakValue::Item("Q" + std::to_string(rng_.Range(100, 9999999)))), false);
      }
      return "/* wbeditentity-update:0| */";
    }
    if (u < 0.88 && e.statements.size() > 1) {
      auto it = std::next(e.statements.begin(),
                          static_cast<ptrdiff_t>(rng_.Below(e.statements.size())));
      const std::string pid = it->first;
      e.statements.erase(it);
      return "/* wbremoveclaims-remove:1| */ [[Property:" + pid + "]]";
    }
    if (u < 0.93 && e.sitelinks.contains("enwiki")) {
      e.sitelinks["enwiki"].title = junk;
      return "/* wbsetsitelink-set:1|enwiki */ " + junk;
    }
    if (u < 0.97) {
      e.aliases["en"].push_back(junk);
      return "/* wbsetaliases-add:1|en */ " + junk;
    }
    e.labels["en"] = junk;
    return "/* wbsetlabel-set:1|en */ " + junk;
  }

  // --- emission ------------------------------------------------------------

  void Tick(int64_t lo, int64_t hi) { clock_ += rng_.Range(lo, hi); }

  int64_t Emit(Item& item, EntityRevision next, const UserInfo& user, std::string comment,
               std::optional<bool> truth) {
    next_rev_ += rng_.Range(1, 3);
    RevisionEnvelope env;
    env.meta.rev_id = next_rev_;
    env.meta.parent_rev_id = item.last_rev;
    env.meta.user = user;
    env.meta.comment = std::move(comment);
    env.meta.timestamp = clock_;
    if (item.last_rev != 0) env.parent_json = item.json;
    env.child_json = SerializeEntity(next);
    item.json = env.child_json;
    item.state = std::move(next);
    item.last_rev = next_rev_;
    out_.envelopes.push_back(std::move(env));
    if (truth) out_.ground_truth[next_rev_] = *truth;
    return next_rev_;
  }

  size_t CreateItem(const UserInfo& user, bool counted) {
    Item item;
    item.human = rng_.Bernoulli(0.5);
    const std::string qid = "Q" + std::to_string(1000 + items_.size() * 7 + rng_.Below(7));
    EntityRevision e = NewEntity(item.human, qid);
    items_.push_back(std::move(item));
    Emit(items_.back(), std::move(e), user, "/* wbeditentity-create:0| */",
         counted ? std::optional<bool>(false) : std::nullopt);
    return items_.size() - 1;
  }

  std::optional<size_t> UnlockedItem() {
    for (int attempt = 0; attempt < 50; ++attempt) {
      const size_t i = rng_.Below(items_.size());
      if (!items_[i].locked) return i;
    }
    return std::nullopt;
  }

  void ScheduleRevert(size_t i, const EntityRevision& before, const std::string& before_json,
                      int64_t before_rev, const std::string& reverted_user) {
    items_[i].locked = true;
    pending_.push_back({clock_ + rng_.Range(60, 6 * 3600), i, before_json, before,
                        reverted_user, before_rev});
  }

  void FlushDue(bool all) {
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const PendingRevert& a, const PendingRevert& b) { return a.due < b.due; });
    while (!pending_.empty() && (all || pending_.front().due <= clock_)) {
      PendingRevert p = std::move(pending_.front());
      pending_.pop_front();
      if (all) Tick(5, 30);
      Item& item = items_[p.item];
      const double u = rng_.Uniform();
      std::string comment;
      UserInfo reverter = Trusted();
      if (u < 0.6) {
        comment = "Reverted edits by [[Special:Contributions/" + p.reverted_user + "|" +
                  p.reverted_user + "]] ([[User talk:" + p.reverted_user +
                  "|talk]]) to last revision by [[User:" + reverter.name + "|" + reverter.name + "]]";
      } else if (u < 0.85) {
        comment = "/* undo:0||" + std::to_string(item.last_rev) + "|" + p.reverted_user + " */";
        if (rng_.Bernoulli(0.3)) reverter = Established();
      } else {
        comment = "/* restore:0||" + std::to_string(p.restored_rev) + "|" + reverter.name + " */";
      }
      Emit(item, p.restored, reverter, std::move(comment), false);
      item.locked = false;
    }
  }

  bool VandalEvent() {
    auto i = UnlockedItem();
    if (!i) return false;
    Item& item = items_[*i];
    const EntityRevision before = item.state;
    const std::string before_json = item.json;
    const int64_t before_rev = item.last_rev;
    EntityRevision e = item.state;
    std::string comment;
    const double planted = spec_.signal == SignalPlacement::kNone    ? 0.0
                           : spec_.signal == SignalPlacement::kContent ? 0.9
                                                                       : 0.75;
    if (rng_.Bernoulli(planted)) {
      comment = VandalChange(item, e);
    } else {
      comment = GoodChange(item, e, false);
    }
    const UserInfo user = VandalUser();
    Emit(item, std::move(e), user, std::move(comment), true);
    ScheduleRevert(*i, before, before_json, before_rev, user.name);
    return true;
  }

  // Returns the number of human edits produced.
  int64_t NormalEvent(int64_t remaining) {
    const double u = rng_.Uniform();
    double edge = spec_.trusted_share;
    if (u >= edge + spec_.client_share + spec_.merge_share &&
        u < edge + spec_.client_share + spec_.merge_share + spec_.creation_share) {
      CreateItem(GoodUser(), true);
      return 1;
    }
    auto i = UnlockedItem();
    if (!i) {
      CreateItem(GoodUser(), true);
      return 1;
    }
    Item& item = items_[*i];
    const EntityRevision before = item.state;
    const std::string before_json = item.json;
    const int64_t before_rev = item.last_rev;
    EntityRevision e = item.state;
    UserInfo user;
    std::string comment;
    double revert_rate = 0.0;
    if (u < edge) {
      user = Trusted();
      comment = GoodChange(item, e, true);
      revert_rate = 0.01;
    } else if (u < (edge += spec_.client_share)) {
      user = rng_.Bernoulli(0.8) ? Established() : NewAccount();
      const std::string old_title = e.sitelinks.contains("enwiki") ? e.sitelinks["enwiki"].title : "";
      const std::string title = e.labels["en"] + " (moved " + Fresh() + ")";
      e.sitelinks["enwiki"] = {"enwiki", title, {}};
      comment = "/* clientsitelink-update:0|enwiki|enwiki:" + old_title + "|enwiki:" + title + " */";
      revert_rate = 0.02;
    } else if (u < (edge += spec_.merge_share)) {
      user = rng_.Bernoulli(0.5) ? Trusted() : Established();
      for (int k = 0, m = static_cast<int>(rng_.Range(1, 3)); k < m; ++k) {
        const char* wiki = Choose(rng_, kWikis);
        e.sitelinks[wiki] = {wiki, e.labels["en"] + " " + Fresh(), {}};
        e.labels[Choose(rng_, kLanguages)] = e.labels["en"] + " " + Fresh();
      }
      AddStatement(item, e);
      comment = "/* wbmergeitems-from:0||Q" + std::to_string(rng_.Range(1000000, 9999999)) + " */";
    } else {
      user = GoodUser();
      comment = GoodChange(item, e, false);
      revert_rate = spec_.goodfaith_revert_rate;
    }
    Emit(item, std::move(e), user, std::move(comment), false);
    if (remaining >= 2 && rng_.Bernoulli(revert_rate)) {
      ScheduleRevert(*i, before, before_json, before_rev, user.name);
      return 2;
    }
    return 1;
  }

  void BotEdit() {
    auto i = UnlockedItem();
    if (!i) return;
    Item& item = items_[*i];
    EntityRevision e = item.state;
    Add(e, Stmt("P646", SnakValue::ExternalId("/m/0" + Fresh())), false);
    Emit(item, std::move(e), bot_, "/* wbsetclaim-create:2||1 */ [[Property:P646]]",
         std::nullopt);
    Tick(1, 5);
  }

  const SynthSpec& spec_;
  Rng rng_;
  UnixSeconds clock_ = 0;
  int64_t next_rev_ = 100000;
  int64_t counter_ = 0;
  UserInfo bot_;
  std::vector<UserInfo> trusted_;
  std::vector<UserInfo> established_;
  std::vector<Item> items_;
  std::deque<PendingRevert> pending_;
  SynthOutput out_;
};

}  // namespace

SynthOutput GenerateSynthetic(const SynthSpec& spec) {
  spec.Validate();
  return Generator(spec).Run();
}

void WriteSynthetic(const std::filesystem::path& dir, const SynthSpec& spec,
                    const SynthOutput& output) {
  WriteFixture(dir, output.envelopes, output.users);
  WriteFile(dir / "properties.txt", SynthPropertiesText());
  std::string truth;
  for (const auto& [rev, vandal] : output.ground_truth) {
    truth += json{{"rev_id", rev}, {"vandalism", vandal}}.dump() + "\n";
  }
  WriteFile(dir / "truth.jsonl", truth);
  WriteFile(dir / "synth_spec.json", spec.ToJson().dump(2) + "\n");
}

}  // namespace vsentinel
