#include "wildfire/fire_store.hpp"

#include <algorithm>

#include "wildfire/errors.hpp"

namespace wildfire {

std::string status_name(FireStatus s) {
  switch (s) {
    case FireStatus::Pending: return "pending";
    case FireStatus::Active: return "active";
    case FireStatus::Stopped: return "stopped";
  }
  return "unknown";
}

FireStatus parse_status(const std::string& s) {
  if (s == "pending") return FireStatus::Pending;
  if (s == "active") return FireStatus::Active;
  if (s == "stopped") return FireStatus::Stopped;
  throw ParseError("unknown fire status '" + s + "'");
}

FireStore::FireStore(std::filesystem::path journal) : journal_path_(std::move(journal)) {
  if (std::filesystem::exists(*journal_path_)) {
    std::ifstream in(*journal_path_);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        apply(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(journal_path_->string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  journal_.open(*journal_path_, std::ios::app);
  if (!journal_) throw std::runtime_error("cannot open journal " + journal_path_->string());
}

nlohmann::json FireStore::rings_to_json(const IsochroneSet& rings) {
  nlohmann::json out = {{"anchor", {rings.anchor.lon, rings.anchor.lat}}, {"rings", nlohmann::json::array()}};
  for (const auto& r : rings.rings) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Point& p : r.polygon) pts.push_back({p.x, p.y});
    out["rings"].push_back({{"minutes", r.minutes}, {"polygon", pts}});
  }
  return out;
}

IsochroneSet FireStore::rings_from_json(const nlohmann::json& doc) {
  IsochroneSet set;
  set.anchor = {doc.at("anchor").at(0).get<double>(), doc.at("anchor").at(1).get<double>()};
  for (const auto& r : doc.at("rings")) {
    Isochrone iso;
    iso.minutes = r.at("minutes").get<int>();
    for (const auto& p : r.at("polygon")) iso.polygon.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    set.rings.push_back(std::move(iso));
  }
  return set;
}

void FireStore::apply(const nlohmann::json& entry) {
  const std::string op = entry.at("op");
  if (op == "create") {
    const auto& f = entry.at("fire");
    FireEvent fire;
    fire.id = f.at("id");
    fire.scenario = ScenarioConfig::from_json(f.at("scenario"));
    fire.note = f.value("note", "");
    fire.status = FireStatus::Pending;
    if (fires_.contains(fire.id)) throw TransitionError("duplicate fire id " + fire.id);
    order_.push_back(fire.id);
    fires_.emplace(fire.id, std::move(fire));
    return;
  }
  const std::string id = entry.at("id");
  const auto it = fires_.find(id);
  if (it == fires_.end()) throw TransitionError("unknown fire " + id);
  FireEvent& fire = it->second;
  if (op == "ignite") {
    if (fire.status != FireStatus::Pending) throw TransitionError("fire " + id + " is not pending");
    fire.rings = rings_from_json(entry.at("rings"));
    fire.status = FireStatus::Active;
  } else if (op == "stop") {
    if (fire.status != FireStatus::Active) throw TransitionError("fire " + id + " is not active");
    fire.status = FireStatus::Stopped;
    fire.rings.reset();
  } else if (op == "delete") {
    fires_.erase(it);
    order_.erase(std::find(order_.begin(), order_.end(), id));
  } else {
    throw ParseError("unknown journal op '" + op + "'");
  }
}

void FireStore::append(const nlohmann::json& entry) {
  apply(entry);
  if (journal_.is_open()) {
    journal_ << entry.dump() << '\n';
    journal_.flush();
  }
}

void FireStore::create(FireEvent fire) {
  append({{"op", "create"},
          {"fire", {{"id", fire.id}, {"scenario", fire.scenario.to_json()}, {"note", fire.note}}}});
}

void FireStore::activate(const std::string& id, IsochroneSet rings) {
  append({{"op", "ignite"}, {"id", id}, {"rings", rings_to_json(rings)}});
}

void FireStore::stop(const std::string& id) { append({{"op", "stop"}, {"id", id}}); }

void FireStore::remove(const std::string& id) { append({{"op", "delete"}, {"id", id}}); }

const FireEvent* FireStore::find(const std::string& id) const {
  const auto it = fires_.find(id);
  return it == fires_.end() ? nullptr : &it->second;
}

std::vector<const FireEvent*> FireStore::list() const {
  std::vector<const FireEvent*> out;
  out.reserve(order_.size());
  for (const auto& id : order_) out.push_back(&fires_.at(id));
  return out;
}

}  // namespace wildfire
