#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hogsos/bisim.hpp"
#include "hogsos/engine.hpp"

namespace hogsos {

using Json = nlohmann::ordered_json;

// Trace documents. `show` renders states and successors.
template <class T, class Show>
Json trace_to_json(const BasicTrace<T>& tr, Show&& show) {
  Json events = Json::array();
  for (const auto& e : tr.events)
    events.push_back({{"state", show(e.state)},
                      {"kind", to_string(e.kind)},
                      {"next", e.successor ? Json(show(*e.successor)) : Json(nullptr)}});
  return {{"trace", std::move(events)}, {"terminal", to_string(tr.end)}};
}

// One record per line.
template <class T, class Show>
std::string trace_to_jsonl(const BasicTrace<T>& tr, Show&& show) {
  std::string out;
  for (std::size_t i = 0; i < tr.events.size(); ++i) {
    const auto& e = tr.events[i];
    Json rec = {{"index", i},
                {"state", show(e.state)},
                {"kind", to_string(e.kind)},
                {"successor", e.successor ? Json(show(*e.successor)) : Json(nullptr)}};
    out += rec.dump() + "\n";
  }
  return out;
}

template <class T, class Show>
Json move_to_json(const BasicMove<T>& m, Show&& show) {
  Json j = {{"move", to_string(m.kind)}};
  switch (m.kind) {
    case MoveKind::reduce: break;
    case MoveKind::apply: j["arg"] = show(*m.arg); break;
    case MoveKind::subst: {
      Json terms = Json::array();
      for (const auto& u : m.tuple) terms.push_back(show(u));
      j["terms"] = std::move(terms);
      break;
    }
    case MoveKind::rename:
      j["map"] = m.renaming;
      j["target"] = m.target;
      break;
  }
  return j;
}

template <class T, class Read>
BasicMove<T> move_from_json(const Json& j, Read&& read) {
  const std::string kind = j.at("move").get<std::string>();
  if (kind == "reduce") return BasicMove<T>::reduce();
  if (kind == "apply") return BasicMove<T>::apply(read(j.at("arg").get<std::string>()));
  if (kind == "subst") {
    std::vector<T> terms;
    for (const auto& s : j.at("terms")) terms.push_back(read(s.get<std::string>()));
    return BasicMove<T>::subst(std::move(terms));
  }
  if (kind == "rename")
    return BasicMove<T>::rename(j.at("map").get<std::vector<std::size_t>>(), j.at("target").get<std::size_t>());
  throw Error("unknown move '" + kind + "'");
}

template <class T, class Read>
std::vector<BasicMove<T>> moves_from_json(const Json& j, Read&& read) {
  std::vector<BasicMove<T>> out;
  for (const auto& m : j) out.push_back(move_from_json<T>(m, read));
  return out;
}

inline Json behavior_to_json(const Behavior& b) {
  Json j = {{"kind", to_string(b.kind())}};
  if (b.term()) j["term"] = render_pretty(*b.term());
  return j;
}

template <class Read>
Behavior behavior_from_json(const Json& j, Read&& read) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "reduce") return Behavior::reduce(read(j.at("term").get<std::string>()));
  if (kind == "fun") return Behavior::fun(read(j.at("term").get<std::string>()));
  if (kind == "stuck") return Behavior::stuck();
  throw Error("unknown behaviour kind '" + kind + "'");
}

inline Json nd_witness_to_json(const NdWitness& w) {
  Json responses = Json::array();
  for (const auto& r : w.responses) {
    Json j = {{"reply", behavior_to_json(r.reply)}};
    if (r.arg) j["arg"] = render_pretty(*r.arg);
    j["sub"] = r.sub ? nd_witness_to_json(*r.sub) : Json(nullptr);
    responses.push_back(std::move(j));
  }
  return {{"side", w.side == NdWitness::Side::left ? "left" : "right"},
          {"choice", behavior_to_json(w.choice)},
          {"responses", std::move(responses)}};
}

// `read` parses a rendered term; template holes parse as the hole variable.
template <class Read>
std::shared_ptr<const NdWitness> nd_witness_from_json(const Json& j, Read&& read) {
  auto w = std::make_shared<NdWitness>();
  const std::string side = j.at("side").get<std::string>();
  if (side != "left" && side != "right") throw Error("unknown side '" + side + "'");
  w->side = side == "left" ? NdWitness::Side::left : NdWitness::Side::right;
  w->choice = behavior_from_json(j.at("choice"), read);
  for (const auto& r : j.at("responses")) {
    NdWitness::Response resp{behavior_from_json(r.at("reply"), read), std::nullopt, nullptr};
    if (r.contains("arg")) resp.arg = read(r.at("arg").get<std::string>());
    if (!r.at("sub").is_null()) resp.sub = nd_witness_from_json(r.at("sub"), read);
    w->cost = std::max(w->cost, resp.sub ? resp.sub->cost + 1 : 1);
    w->responses.push_back(std::move(resp));
  }
  return w;
}

template <class T, class Show>
Json verdict_to_json(const BasicVerdict<T>& v, Show&& show) {
  Json j = {{"verdict", v.distinguished ? "distinguished" : "no_counterexample"},
            {"depth", v.depth},
            {"pool_size", v.pool_size}};
  if (v.tuples_tried > 0) j["tuples_tried"] = v.tuples_tried;
  if (v.distinguished) {
    Json w = Json::array();
    for (const auto& m : v.witness) w.push_back(move_to_json(m, show));
    j["witness"] = std::move(w);
    j["mismatch"] = to_string(v.mismatch);
    if (v.certificate) j["certificate"] = nd_witness_to_json(*v.certificate);
  }
  return j;
}

template <class T, class Show>
Json probe_to_json(const BasicProbeReport<T>& r, Show&& show) {
  Json j;
  if (r.refused) {
    j["refused"] = verdict_to_json(*r.refused, show);
    j["seed"] = r.seed;
    return j;
  }
  Json anomalies = Json::array();
  for (const auto& a : r.anomalies) {
    Json w = Json::array();
    for (const auto& m : a.verdict.witness) w.push_back(move_to_json(m, show));
    anomalies.push_back({{"context", a.context}, {"witness", std::move(w)}});
  }
  j["anomalies"] = std::move(anomalies);
  j["contexts_tried"] = r.contexts_tried;
  j["seed"] = r.seed;
  return j;
}

}  // namespace hogsos
