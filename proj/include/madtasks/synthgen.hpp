#pragma once

// Deterministic synthetic datasets calibrated to published engagement
// marginals.
//
// The nine event types overlap, so events are generated in disjoint strata
// ("atoms", one per membership signature): near-crashes, level-4 crashes and
// level 1-3 crashes split by severity band and flags. Each atom receives
// integer counts over seven task-structure profiles (no task, one task, two
// tasks in one group, ...), fitted by integer local search so that every
// event type's engagement percentages under both taxonomies match the target.
// Task identities are then allocated per atom: pinned pairs first, pinned task
// counts next, the rest drawn by weight from a seeded generator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "madtasks/dataset.hpp"
#include "madtasks/error.hpp"
#include "madtasks/event.hpp"
#include "madtasks/registry.hpp"

namespace madtasks {

struct EngagementTarget {
  std::uint64_t n = 0;
  // Percentages of the event-type population.
  double no_task_pct = 0;
  double sad_pct = 0;
  double mad_pct = 0;
  double three_plus_pct = 0;
  double g14_mad_pct = 0;
  double g14_three_plus_pct = 0;
};

struct PairPin {
  std::string a;
  std::string b;
  std::uint64_t count = 0;
};

struct TypePins {
  std::map<std::string, std::uint64_t> task_counts;
  std::vector<PairPin> pair_counts;
};

struct CalibrationTarget {
  std::uint64_t seed = 0;
  std::map<EventType, EngagementTarget> event_types;
  double default_task_weight = 1.0;
  std::map<std::string, double> task_weights;
  std::map<EventType, TypePins> pins;
};

// ---------------------------------------------------------------------------
// Target document

inline CalibrationTarget parse_calibration_target(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> void { throw ContractViolation("calibration target: " + what); };
  if (!j.is_object()) fail("expected a JSON object");
  CalibrationTarget t;
  if (j.contains("seed")) t.seed = j.at("seed").get<std::uint64_t>();
  if (!j.contains("event_types") || !j["event_types"].is_object()) fail("missing \"event_types\" object");
  for (auto it = j["event_types"].begin(); it != j["event_types"].end(); ++it) {
    auto type = parse_event_type(it.key());
    if (!type) fail("unknown event type \"" + it.key() + "\"");
    const auto& v = it.value();
    EngagementTarget e;
    e.n = v.at("n").get<std::uint64_t>();
    e.no_task_pct = v.value("no_task_pct", 0.0);
    e.sad_pct = v.value("sad_pct", 0.0);
    e.mad_pct = v.value("mad_pct", 0.0);
    e.three_plus_pct = v.value("three_plus_pct", 0.0);
    e.g14_mad_pct = v.value("g14_mad_pct", e.mad_pct);
    e.g14_three_plus_pct = v.value("g14_three_plus_pct", e.three_plus_pct);
    t.event_types[*type] = e;
  }
  if (j.contains("task_weights")) {
    for (auto it = j["task_weights"].begin(); it != j["task_weights"].end(); ++it) {
      if (it.key() == "default") {
        t.default_task_weight = it.value().get<double>();
      } else {
        parse_task(it.key());
        t.task_weights[it.key()] = it.value().get<double>();
      }
    }
  }
  if (j.contains("pins")) {
    for (auto it = j["pins"].begin(); it != j["pins"].end(); ++it) {
      auto type = parse_event_type(it.key());
      if (!type) fail("unknown event type \"" + it.key() + "\" in pins");
      TypePins p;
      const auto& v = it.value();
      if (v.contains("task_counts")) {
        for (auto tc = v["task_counts"].begin(); tc != v["task_counts"].end(); ++tc) {
          parse_task(tc.key());
          p.task_counts[tc.key()] = tc.value().get<std::uint64_t>();
        }
      }
      if (v.contains("pair_counts")) {
        for (const auto& pc : v["pair_counts"]) {
          PairPin pin{pc.at("a").get<std::string>(), pc.at("b").get<std::string>(), pc.at("count").get<std::uint64_t>()};
          parse_task(pin.a);
          parse_task(pin.b);
          p.pair_counts.push_back(pin);
        }
      }
      t.pins[*type] = std::move(p);
    }
  }
  return t;
}

inline CalibrationTarget load_calibration_target(const std::string& path) {
  const auto text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ContractViolation("calibration target " + path + ": " + e.what());
  }
  return parse_calibration_target(j);
}

namespace synth {

// Deterministic across platforms: splitmix64 plus explicit sampling helpers
// (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

// Task-structure profiles. Group patterns list how many tasks come from each
// distinct group.
enum Profile : int { P0, P1, P2Same, P2Diff, P3Same, P3Two, P3Three, kProfiles };

inline const std::vector<int>& group_pattern(int p) {
  static const std::array<std::vector<int>, kProfiles> patterns{{{}, {1}, {2}, {1, 1}, {3}, {2, 1}, {1, 1, 1}}};
  return patterns[static_cast<std::size_t>(p)];
}

// Six engagement statistics: no task, SAD, MAD, 3+, G14 MAD, G14 3+.
inline constexpr int kStats = 6;

inline bool profile_in_stat(int p, int s) {
  switch (s) {
    case 0: return p == P0;
    case 1: return p == P1;
    case 2: return p >= P2Same;
    case 3: return p >= P3Same;
    case 4: return p == P2Diff || p == P3Two || p == P3Three;
    case 5: return p == P3Three;
  }
  return false;
}

inline std::array<double, kProfiles> profile_fractions(const EngagementTarget& t) {
  const double total = t.no_task_pct + t.sad_pct + t.mad_pct;
  const double k = total > 0 ? 1.0 / total : 0.0;
  const double mad = t.mad_pct * k, t3 = t.three_plus_pct * k, madg = t.g14_mad_pct * k, t3g = t.g14_three_plus_pct * k;
  std::array<double, kProfiles> f{};
  f[P0] = t.no_task_pct * k;
  f[P1] = t.sad_pct * k;
  f[P3Three] = t3g;
  f[P3Two] = std::min(t3 - t3g, madg - t3g);
  f[P3Same] = t3 - t3g - f[P3Two];
  f[P2Diff] = madg - t3g - f[P3Two];
  f[P2Same] = mad - t3 - f[P2Diff];
  return f;
}

inline void check_target(EventType type, const EngagementTarget& t) {
  const std::string name(to_string(type));
  auto bad = [&](const std::string& what) { throw InfeasibleError(name + ": " + what); };
  for (double v : {t.no_task_pct, t.sad_pct, t.mad_pct, t.three_plus_pct, t.g14_mad_pct, t.g14_three_plus_pct}) {
    if (!(v >= 0.0 && v <= 100.0)) bad("percentages must lie in [0, 100]");
  }
  if (t.n == 0) return;
  const double total = t.no_task_pct + t.sad_pct + t.mad_pct;
  if (std::fabs(total - 100.0) > 1.0 + 1e-9) bad("no-task + SAD + MAD must be 100 within 1 point");
  if (t.three_plus_pct > t.mad_pct) bad("3+ exceeds MAD");
  if (t.g14_mad_pct > t.mad_pct) bad("G14 MAD exceeds MAD");
  if (t.g14_three_plus_pct > t.three_plus_pct) bad("G14 3+ exceeds 3+");
  if (t.g14_three_plus_pct > t.g14_mad_pct) bad("G14 3+ exceeds G14 MAD");
}

// A disjoint stratum of events sharing one membership signature.
struct Atom {
  EventKind kind = EventKind::Crash;
  int severity = 0;  // 0 for near-crashes; 12 = severity band 1-2
  bool at_fault = false;
  bool run_off_road = false;
  bool rear_end = false;
  std::uint64_t size = 0;
  EventTypeSet members;
  std::array<std::int64_t, kProfiles> profile_counts{};
};

inline EventTypeSet signature(const Atom& a) {
  EventRecord e;
  e.kind = a.kind;
  if (a.kind == EventKind::Baseline) {
    e.balanced = e.speed_over_5mph = true;
  }
  if (a.kind == EventKind::Crash) e.severity = a.severity == 12 ? 2 : a.severity;
  e.at_fault = a.at_fault;
  e.run_off_road = a.run_off_road;
  e.rear_end_striking = a.rear_end;
  return membership_of(e);
}

// Largest-remainder split of `total` proportionally to `weights`.
inline std::vector<std::uint64_t> apportion(std::uint64_t total, const std::vector<double>& weights) {
  std::vector<std::uint64_t> out(weights.size(), 0);
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || sum <= 0) return out;
  std::vector<std::pair<double, std::size_t>> rema;
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::uint64_t>(std::floor(quota));
    used += out[i];
    rema.push_back({quota - std::floor(quota), i});
  }
  std::stable_sort(rema.begin(), rema.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  for (std::size_t k = 0; used < total; ++k, ++used) ++out[rema[k % rema.size()].second];
  return out;
}

struct Populations {
  std::uint64_t cds = 0, cnc = 0, l14 = 0, l13 = 0, l12 = 0, at_fault = 0, ror = 0, rear_end = 0;
};

inline std::vector<Atom> build_atoms(const CalibrationTarget& target) {
  auto given = [&](EventType t) -> std::optional<std::uint64_t> {
    auto it = target.event_types.find(t);
    if (it == target.event_types.end()) return std::nullopt;
    return it->second.n;
  };
  Populations p;
  p.cds = given(EventType::CDS).value_or(0);
  p.l12 = given(EventType::L1_2).value_or(0);
  p.at_fault = given(EventType::L1_3_AtFault).value_or(0);
  p.ror = given(EventType::RunOffRoad).value_or(0);
  p.rear_end = given(EventType::RearEndStriking).value_or(0);
  p.l13 = given(EventType::L1_3).value_or(std::max({p.l12, p.at_fault, p.ror + p.rear_end}));
  p.l14 = given(EventType::L1_4).value_or(p.l13);
  p.cnc = given(EventType::CNC).value_or(p.l14);

  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw InfeasibleError("event-type populations: " + what);
  };
  need(p.l14 <= p.cnc, "L1-4 exceeds CNC");
  need(p.l13 <= p.l14, "L1-3 exceeds L1-4");
  need(p.l12 <= p.l13, "L1-2 exceeds L1-3");
  need(p.at_fault <= p.l13, "L1-3-at-fault exceeds L1-3");
  need(p.ror + p.rear_end <= p.l13, "run-off-road plus rear-end-striking exceed L1-3");
  const std::uint64_t near_crashes = p.cnc - p.l14;
  if (auto n = given(EventType::L1_3_NC)) {
    need(*n == p.l13 + near_crashes, "L1-3+NC must equal L1-3 plus near-crashes (CNC - L1-4) = " +
                                         std::to_string(p.l13 + near_crashes));
  }

  std::vector<Atom> atoms;
  auto push = [&](Atom a) {
    if (a.size == 0) return;
    a.members = signature(a);
    atoms.push_back(a);
  };
  push(Atom{EventKind::Baseline, 0, false, false, false, p.cds, {}, {}});
  push(Atom{EventKind::NearCrash, 0, false, false, false, near_crashes, {}, {}});
  push(Atom{EventKind::Crash, 4, false, false, false, p.l14 - p.l13, {}, {}});

  // Flag groups inside L1-3: rear-end (at-fault first), run-off-road, other.
  const std::uint64_t other = p.l13 - p.ror - p.rear_end;
  const std::uint64_t re_af = std::min(p.rear_end, p.at_fault);
  const std::uint64_t af_rest = p.at_fault - re_af;
  auto af_split = apportion(af_rest, {static_cast<double>(p.ror), static_cast<double>(other)});
  need(af_split[0] <= p.ror && af_split[1] <= other, "cannot place at-fault crashes");
  struct FlagGroup {
    bool af, ror, re;
    std::uint64_t size;
  };
  const std::vector<FlagGroup> flags{
      {true, false, true, re_af},
      {false, false, true, p.rear_end - re_af},
      {true, true, false, af_split[0]},
      {false, true, false, p.ror - af_split[0]},
      {true, false, false, af_split[1]},
      {false, false, false, other - af_split[1]},
  };
  std::vector<double> w;
  for (const auto& f : flags) w.push_back(static_cast<double>(f.size));
  auto l12_split = apportion(p.l12, w);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    push(Atom{EventKind::Crash, 12, flags[i].af, flags[i].ror, flags[i].re, l12_split[i], {}, {}});
    push(Atom{EventKind::Crash, 3, flags[i].af, flags[i].ror, flags[i].re, flags[i].size - l12_split[i], {}, {}});
  }
  return atoms;
}

// ---------------------------------------------------------------------------
// Profile fitting

struct TypeGoal {
  EventType type;
  double n;
  std::array<double, kStats> target;  // fractions
  std::array<double, kStats> current;  // counts
};

inline double stat_penalty(const TypeGoal& g, int s, double count) {
  const double dev = (count / g.n - g.target[static_cast<std::size_t>(s)]) * 100.0;
  return dev * dev;
}

inline void fit_profiles(std::vector<Atom>& atoms, const CalibrationTarget& target) {
  std::vector<TypeGoal> goals;
  for (const auto& [type, t] : target.event_types) {
    if (t.n == 0) continue;
    check_target(type, t);
    TypeGoal g{type, 0.0, {}, {}};
    const auto f = profile_fractions(t);
    for (int s = 0; s < kStats; ++s) {
      for (int p = 0; p < kProfiles; ++p) {
        if (profile_in_stat(p, s)) g.target[static_cast<std::size_t>(s)] += f[static_cast<std::size_t>(p)];
      }
    }
    goals.push_back(g);
  }
  for (auto& g : goals) {
    for (const auto& a : atoms) {
      if (a.members.contains(g.type)) g.n += static_cast<double>(a.size);
    }
  }
  // Start: every atom takes the profile mix of its smallest targeted type.
  for (auto& a : atoms) {
    const EngagementTarget* best = nullptr;
    std::uint64_t best_n = UINT64_MAX;
    for (const auto& [type, t] : target.event_types) {
      if (t.n > 0 && a.members.contains(type) && t.n < best_n) {
        best = &t;
        best_n = t.n;
      }
    }
    std::array<double, kProfiles> f{};
    if (best) {
      f = profile_fractions(*best);
    } else {
      f[P0] = 1.0;
    }
    std::vector<double> w(f.begin(), f.end());
    for (auto& x : w) x = std::max(0.0, x);
    const auto counts = apportion(a.size, w);
    for (int p = 0; p < kProfiles; ++p) a.profile_counts[static_cast<std::size_t>(p)] = static_cast<std::int64_t>(counts[static_cast<std::size_t>(p)]);
  }
  auto recompute = [&]() {
    for (auto& g : goals) {
      g.current.fill(0.0);
      for (const auto& a : atoms) {
        if (!a.members.contains(g.type)) continue;
        for (int p = 0; p < kProfiles; ++p) {
          for (int s = 0; s < kStats; ++s) {
            if (profile_in_stat(p, s)) g.current[static_cast<std::size_t>(s)] += static_cast<double>(a.profile_counts[static_cast<std::size_t>(p)]);
          }
        }
      }
    }
  };
  recompute();
  // Greedy integer local search: move k events of one atom from profile p to
  // q while the summed squared deviation (in points) strictly decreases.
  static constexpr std::array<std::int64_t, 4> kSteps{1, 4, 16, 64};
  for (int iter = 0; iter < 200000; ++iter) {
    double best_gain = 1e-12;
    std::size_t best_atom = 0;
    int best_p = -1, best_q = -1;
    std::int64_t best_k = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto& a = atoms[i];
      for (int p = 0; p < kProfiles; ++p) {
        for (int q = 0; q < kProfiles; ++q) {
          if (p == q) continue;
          for (auto k : kSteps) {
            if (a.profile_counts[static_cast<std::size_t>(p)] < k) break;
            double gain = 0;
            for (const auto& g : goals) {
              if (!a.members.contains(g.type)) continue;
              for (int s = 0; s < kStats; ++s) {
                const bool in_p = profile_in_stat(p, s), in_q = profile_in_stat(q, s);
                if (in_p == in_q) continue;
                const double cur = g.current[static_cast<std::size_t>(s)];
                const double next = cur + static_cast<double>(in_q ? k : -k);
                gain += stat_penalty(g, s, cur) - stat_penalty(g, s, next);
              }
            }
            if (gain > best_gain) {
              best_gain = gain;
              best_atom = i;
              best_p = p;
              best_q = q;
              best_k = k;
            }
          }
        }
      }
    }
    if (best_p < 0) break;
    atoms[best_atom].profile_counts[static_cast<std::size_t>(best_p)] -= best_k;
    atoms[best_atom].profile_counts[static_cast<std::size_t>(best_q)] += best_k;
    recompute();
  }
}

// ---------------------------------------------------------------------------
// Task allocation

struct Slot {
  int profile = P0;
  std::vector<TaskCode> tasks;

  std::size_t capacity() const {
    const auto& pat = group_pattern(profile);
    return static_cast<std::size_t>(std::accumulate(pat.begin(), pat.end(), 0));
  }
  bool complete() const { return tasks.size() == capacity(); }
  bool has(TaskCode t) const { return std::find(tasks.begin(), tasks.end(), t) != tasks.end(); }
};

// Whether `tasks` can be completed to the profile's group pattern. With
// `free` (per-group count of tasks still drawable), the missing tasks must
// also be available; without it only group sizes bound the completion.
inline bool fits(int profile, const std::vector<TaskCode>& tasks, const std::vector<int>* free = nullptr,
                 const std::vector<bool>* drawable = nullptr) {
  const auto& pat = group_pattern(profile);
  const std::size_t cap = static_cast<std::size_t>(std::accumulate(pat.begin(), pat.end(), 0));
  if (tasks.size() > cap) return false;
  struct Used {
    int group, count, drawable_in_event;
  };
  std::vector<Used> groups;
  for (const auto& t : tasks) {
    const int g = group_id_of(t);
    const int d = drawable && (*drawable)[t.id] ? 1 : 0;
    auto it = std::find_if(groups.begin(), groups.end(), [g](const auto& x) { return x.group == g; });
    if (it == groups.end()) {
      groups.push_back({g, 1, d});
    } else {
      ++it->count;
      it->drawable_in_event += d;
    }
  }
  if (groups.size() > pat.size()) return false;
  auto available = [&](int g) { return free ? (*free)[static_cast<std::size_t>(g)] : static_cast<int>(group_size(g)); };
  std::vector<int> slots(pat.size());
  std::iota(slots.begin(), slots.end(), 0);
  do {
    bool ok = true;
    std::vector<bool> taken(pat.size(), false);
    for (std::size_t i = 0; i < groups.size() && ok; ++i) {
      const int mult = pat[static_cast<std::size_t>(slots[i])];
      taken[static_cast<std::size_t>(slots[i])] = true;
      ok = groups[i].count <= mult && group_size(groups[i].group) >= static_cast<std::size_t>(mult);
      if (ok && free) ok = available(groups[i].group) - groups[i].drawable_in_event >= mult - groups[i].count;
    }
    if (!ok) continue;
    if (!free) return true;
    // Open slots need distinct fresh groups with enough drawable tasks.
    std::vector<int> open;
    for (std::size_t k = 0; k < pat.size(); ++k) {
      if (!taken[k]) open.push_back(pat[k]);
    }
    std::vector<int> supply;
    for (int g = 1; g <= kGroupCount; ++g) {
      if (std::none_of(groups.begin(), groups.end(), [g](const auto& u) { return u.group == g; })) {
        supply.push_back(available(g));
      }
    }
    std::sort(open.rbegin(), open.rend());
    std::sort(supply.rbegin(), supply.rend());
    for (std::size_t k = 0; k < open.size() && ok; ++k) ok = k < supply.size() && supply[k] >= open[k];
    if (ok) return true;
  } while (std::next_permutation(slots.begin(), slots.end()));
  return false;
}

inline std::uint64_t task_slots(const Atom& a) {
  std::uint64_t n = 0;
  for (int p = 0; p < kProfiles; ++p) {
    const auto& pat = group_pattern(p);
    n += static_cast<std::uint64_t>(a.profile_counts[static_cast<std::size_t>(p)]) *
         static_cast<std::uint64_t>(std::accumulate(pat.begin(), pat.end(), 0));
  }
  return n;
}

// Events able to hold a pair of tasks from one group (or two groups).
inline std::uint64_t pair_hosts(const Atom& a, bool same_group) {
  std::uint64_t n = 0;
  for (int p = 0; p < kProfiles; ++p) {
    const auto& pat = group_pattern(p);
    const bool ok = same_group ? std::any_of(pat.begin(), pat.end(), [](int m) { return m >= 2; }) : pat.size() >= 2;
    if (ok) n += static_cast<std::uint64_t>(a.profile_counts[static_cast<std::size_t>(p)]);
  }
  return n;
}

struct AtomPins {
  std::map<int, std::uint64_t> task_counts;  // task id -> count
  std::map<std::pair<int, int>, std::uint64_t> pair_counts;  // (low id, high id) -> count
};

inline std::pair<int, int> pair_key(TaskCode a, TaskCode b) {
  return {std::min<int>(a.id, b.id), std::max<int>(a.id, b.id)};
}

inline bool pinned_pair(const AtomPins& pins, TaskCode a, TaskCode b) {
  return pins.pair_counts.count(pair_key(a, b)) > 0;
}

inline std::vector<Slot> allocate_tasks(const Atom& atom, const AtomPins& pins, const CalibrationTarget& target,
                                        Rng& rng, const std::string& where) {
  std::vector<Slot> slots;
  for (int p = 0; p < kProfiles; ++p) {
    for (std::int64_t i = 0; i < atom.profile_counts[static_cast<std::size_t>(p)]; ++i) slots.push_back(Slot{p, {}});
  }
  rng.shuffle(slots);
  auto fail = [&](const std::string& what) { throw InfeasibleError(where + ": " + what); };

  auto conflicts = [&](const Slot& s, TaskCode t) {
    for (const auto& other : s.tasks) {
      if (pinned_pair(pins, other, t)) return true;
    }
    return false;
  };

  // Free fill by weight over unpinned tasks.
  std::vector<TaskCode> pool;
  std::vector<double> weights;
  for (std::uint16_t id = 1; id <= task_count(); ++id) {
    if (pins.task_counts.count(id)) continue;
    const TaskCode t = task_by_id(id);
    auto it = target.task_weights.find(std::string(t.name));
    const double w = it == target.task_weights.end() ? target.default_task_weight : it->second;
    if (w <= 0) continue;
    pool.push_back(t);
    weights.push_back(w);
  }
  std::vector<int> free(static_cast<std::size_t>(kGroupCount) + 1, 0);
  std::vector<bool> drawable(task_count() + 1, false);
  for (const auto& t : pool) {
    ++free[static_cast<std::size_t>(group_id_of(t))];
    drawable[t.id] = true;
  }

  // Pinned pairs: each occupies its own event. Two-task events first.
  for (const auto& [key, count] : pins.pair_counts) {
    const TaskCode a = task_by_id(static_cast<std::uint16_t>(key.first));
    const TaskCode b = task_by_id(static_cast<std::uint16_t>(key.second));
    std::uint64_t placed = 0;
    for (std::size_t want_cap : {std::size_t{2}, std::size_t{3}}) {
      for (auto& s : slots) {
        if (placed == count) break;
        if (!s.tasks.empty() || s.capacity() != want_cap || !fits(s.profile, {a, b}, &free, &drawable)) continue;
        s.tasks = {a, b};
        ++placed;
      }
    }
    if (placed < count) {
      fail("pinned pair \"" + std::string(a.name) + "\" / \"" + std::string(b.name) + "\" needs " +
           std::to_string(count) + " multi-task events, only " + std::to_string(placed) + " available");
    }
  }

  // Pinned task counts, largest first.
  std::vector<std::pair<std::uint64_t, int>> order;
  for (const auto& [id, count] : pins.task_counts) order.push_back({count, id});
  std::stable_sort(order.begin(), order.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  for (const auto& [count, id] : order) {
    const TaskCode t = task_by_id(static_cast<std::uint16_t>(id));
    std::uint64_t have = 0;
    for (const auto& s : slots) have += s.has(t);
    if (have > count) fail("pinned pairs use \"" + std::string(t.name) + "\" more often than its pinned count");
    if (slots.empty()) {
      if (count > 0) fail("no events to place \"" + std::string(t.name) + "\"");
      continue;
    }
    std::vector<std::size_t> visit(slots.size());
    std::iota(visit.begin(), visit.end(), std::size_t{0});
    rng.shuffle(visit);
    for (std::size_t k = 0; k < visit.size() && have < count; ++k) {
      auto& s = slots[visit[k]];
      if (s.complete() || s.has(t) || conflicts(s, t)) continue;
      auto next = s.tasks;
      next.push_back(t);
      if (!fits(s.profile, next, &free, &drawable)) continue;
      s.tasks = std::move(next);
      ++have;
    }
    if (have < count) {
      fail("cannot place " + std::to_string(count) + " events with \"" + std::string(t.name) + "\" (placed " +
           std::to_string(have) + ")");
    }
  }

  std::vector<std::size_t> cand;
  for (auto& s : slots) {
    while (!s.complete()) {
      cand.clear();
      double total = 0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const TaskCode t = pool[i];
        if (s.has(t) || conflicts(s, t)) continue;
        auto next = s.tasks;
        next.push_back(t);
        if (!fits(s.profile, next, &free, &drawable)) continue;
        cand.push_back(i);
        total += weights[i];
      }
      if (cand.empty()) {
        std::string have;
        for (const auto& t : s.tasks) have += " \"" + std::string(t.name) + "\"";
        fail("no task can complete profile " + std::to_string(s.profile) + " holding" + have);
      }
      double r = rng.unit() * total;
      std::size_t pick = cand.back();
      for (auto i : cand) {
        if (r < weights[i]) {
          pick = i;
          break;
        }
        r -= weights[i];
      }
      s.tasks.push_back(pool[pick]);
    }
  }
  return slots;
}

}  // namespace synth

// Builds the dataset. Deterministic for a given target (including its seed).
inline Dataset generate(const CalibrationTarget& target) {
  using namespace synth;
  auto atoms = build_atoms(target);
  fit_profiles(atoms, target);

  // Distribute per-type pins over that type's atoms by atom size.
  std::vector<AtomPins> atom_pins(atoms.size());
  std::vector<int> pinned_by(atoms.size(), -1);
  for (const auto& [type, pins] : target.pins) {
    std::vector<std::size_t> idx;
    std::vector<double> w;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!atoms[i].members.contains(type)) continue;
      if (pinned_by[i] >= 0) {
        throw InfeasibleError("pins for " + std::string(to_string(type)) + " overlap pins for " +
                              std::string(to_string(static_cast<EventType>(pinned_by[i]))));
      }
      pinned_by[i] = static_cast<int>(type);
      idx.push_back(i);
      w.push_back(static_cast<double>(task_slots(atoms[i])));
    }
    if (idx.empty()) {
      bool any = false;
      for (const auto& [name, c] : pins.task_counts) any = any || c > 0;
      for (const auto& pc : pins.pair_counts) any = any || pc.count > 0;
      if (any) throw InfeasibleError("pins given for " + std::string(to_string(type)) + ", which has no events");
      continue;
    }
    std::map<int, std::vector<std::uint64_t>> pair_use;  // task id -> per-atom pair occurrences
    for (const auto& pc : pins.pair_counts) {
      const TaskCode a = parse_task(pc.a), b = parse_task(pc.b);
      if (a == b) throw InfeasibleError("pinned pair repeats \"" + pc.a + "\"");
      for (const auto& [name, cnt] : pins.task_counts) {
        const TaskCode t = parse_task(name);
        if ((t == a || t == b) && pc.count > cnt) {
          throw InfeasibleError("pinned pair count " + std::to_string(pc.count) + " for \"" + pc.a + "\" / \"" +
                                pc.b + "\" exceeds the pinned count of \"" + name + "\"");
        }
      }
      // Split by how many events of each atom could hold the pair.
      std::vector<double> hosts;
      for (auto i : idx) hosts.push_back(static_cast<double>(pair_hosts(atoms[i], group_id_of(a) == group_id_of(b))));
      const auto split = apportion(pc.count, hosts);
      const auto key = synth::pair_key(a, b);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (split[k] > 0) atom_pins[idx[k]].pair_counts[key] += split[k];
        for (int id : {key.first, key.second}) {
          auto& v = pair_use[id];
          v.resize(idx.size(), 0);
          v[k] += split[k];
        }
      }
    }
    for (const auto& [name, count] : pins.task_counts) {
      const int id = parse_task(name).id;
      auto split = apportion(count, w);
      // Keep each atom's task count at least its pinned-pair occurrences.
      if (auto it = pair_use.find(id); it != pair_use.end()) {
        std::int64_t deficit = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
          if (split[k] < it->second[k]) {
            deficit += static_cast<std::int64_t>(it->second[k] - split[k]);
            split[k] = it->second[k];
          }
        }
        for (std::size_t k = 0; k < idx.size() && deficit > 0; ++k) {
          const std::uint64_t spare = split[k] - it->second[k];
          const std::uint64_t take = std::min<std::uint64_t>(spare, static_cast<std::uint64_t>(deficit));
          split[k] -= take;
          deficit -= static_cast<std::int64_t>(take);
        }
      }
      for (std::size_t k = 0; k < idx.size(); ++k) atom_pins[idx[k]].task_counts[id] = split[k];
    }
  }

  Rng rng(target.seed);
  std::vector<EventRecord> events;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    const std::string where = "stratum " + std::string(to_string(a.kind)) + " severity " + std::to_string(a.severity);
    auto slots = allocate_tasks(a, atom_pins[i], target, rng, where);
    std::size_t k = 0;
    for (auto& s : slots) {
      EventRecord e;
      e.kind = a.kind;
      if (a.kind == EventKind::Baseline) e.balanced = e.speed_over_5mph = true;
      if (a.kind == EventKind::Crash) e.severity = a.severity == 12 ? (k % 4 == 0 ? 1 : 2) : a.severity;
      e.at_fault = a.at_fault;
      e.run_off_road = a.run_off_road;
      e.rear_end_striking = a.rear_end;
      e.tasks = std::move(s.tasks);
      rng.shuffle(e.tasks);
      events.push_back(std::move(e));
      ++k;
    }
  }
  rng.shuffle(events);
  const int width = std::max<int>(6, static_cast<int>(std::to_string(events.size()).size()));
  for (std::size_t i = 0; i < events.size(); ++i) {
    std::string id = std::to_string(i + 1);
    events[i].event_id = "S" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(id.size(), static_cast<std::size_t>(width)), '0') + id;
  }
  Dataset ds;
  ds.events = std::move(events);
  ds.source_digest = normalized_digest(ds);
  return ds;
}

}  // namespace madtasks
