#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "wildfire/scenario.hpp"
#include "wildfire/spread.hpp"

namespace wildfire {

enum class FireStatus { Pending, Active, Stopped };

std::string status_name(FireStatus s);
FireStatus parse_status(const std::string& s);

struct FireEvent {
  std::string id;
  ScenarioConfig scenario;
  std::string note;
  FireStatus status = FireStatus::Pending;
  std::optional<IsochroneSet> rings;  // present iff active
};

/// Raised for transitions the lifecycle forbids (pending -> active -> stopped).
class TransitionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// In-memory fire records plus an append-only JSON-lines journal. Replaying
/// the journal on construction rebuilds the same records in the same order.
/// Not thread-safe; callers serialize writers.
class FireStore {
 public:
  FireStore() = default;
  explicit FireStore(std::filesystem::path journal);

  void create(FireEvent fire);
  void activate(const std::string& id, IsochroneSet rings);
  void stop(const std::string& id);
  void remove(const std::string& id);

  const FireEvent* find(const std::string& id) const;
  /// Records in creation order.
  std::vector<const FireEvent*> list() const;
  std::size_t size() const { return fires_.size(); }

  static nlohmann::json rings_to_json(const IsochroneSet& rings);
  static IsochroneSet rings_from_json(const nlohmann::json& doc);

 private:
  void apply(const nlohmann::json& entry);
  void append(const nlohmann::json& entry);

  std::unordered_map<std::string, FireEvent> fires_;
  std::vector<std::string> order_;
  std::optional<std::filesystem::path> journal_path_;
  std::ofstream journal_;
};

}  // namespace wildfire
