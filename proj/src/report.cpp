#include "flipbound/report.hpp"

#include "flipbound/errors.hpp"

namespace flipbound {

json to_json(const LinearClassifier& c) { return {{"w", c.w}, {"b", c.b}}; }

LinearClassifier classifier_from_json(const json& j) {
  try {
    return LinearClassifier{j.at("w").get<std::vector<double>>(), j.at("b").get<double>()};
  } catch (const json::exception& e) {
    throw InputError(std::string("bad classifier JSON: ") + e.what());
  }
}

json to_json(const LinearClassifier& c, LossKind loss, std::uint64_t seed) {
  json j = to_json(c);
  j["loss"] = to_string(loss);
  j["seed"] = seed;
  return j;
}

json to_json(const ExactResult& r) {
  return {{"robustness", r.robustness},   {"flip_set", r.flip_set},
          {"witness", to_json(r.witness)}, {"status", to_string(r.status)},
          {"best_bound", r.best_bound},   {"nodes", r.node_count},
          {"lp_failures", r.lp_failures}};
}

json to_json(const LowerBoundReport& r, bool with_timings) {
  json blocks = json::array();
  for (const auto& b : r.blocks) {
    json jb = {{"id", b.id},
               {"size", b.size},
               {"r", b.robustness},
               {"best_bound", b.best_bound},
               {"status", to_string(b.status)},
               {"nodes", b.node_count}};
    if (!b.error.empty()) jb["error"] = b.error;
    if (with_timings) jb["millis"] = b.millis;
    blocks.push_back(std::move(jb));
  }
  return {{"lower", r.lower}, {"k", r.k}, {"seed", r.seed}, {"blocks", std::move(blocks)}};
}

json to_json(const UpperBoundReport& r) {
  json trials = json::array();
  for (const auto& t : r.trials) {
    json jt = {{"seed", t.seed},
               {"loss", to_string(t.loss)},
               {"target_ok", t.target_ok},
               {"misclassified", t.misclassified},
               {"epochs", t.epochs}};
    if (!t.error.empty()) jt["error"] = t.error;
    trials.push_back(std::move(jt));
  }
  json j = {{"upper", r.upper},
            {"certified", r.certified},
            {"flip_set", r.flip_set},
            {"witness", to_json(r.witness)},
            {"trials", std::move(trials)}};
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

json to_json(const ComparisonTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"upper_before", r.upper_before},
                    {"upper_after", r.upper_after},
                    {"lower_before", r.lower_before},
                    {"lower_after", r.lower_after},
                    {"certified_before", r.certified_before},
                    {"certified_after", r.certified_after}});
  }
  return {{"rows", std::move(rows)},
          {"mean_upper_before", t.mean_upper_before},
          {"mean_upper_after", t.mean_upper_after},
          {"mean_lower_before", t.mean_lower_before},
          {"mean_lower_after", t.mean_lower_after},
          {"changed", t.changed},
          {"fixed_point", t.fixed_point}};
}

json to_json(const Grid& g) {
  json rows = json::array();
  for (const auto& r : g.rows) {
    rows.push_back(
        {{"fraction", r.fraction}, {"rho", r.rho}, {"accuracy", r.accuracy}, {"n", r.n_points}});
  }
  return {{"attack_loss", to_string(g.attack)},
          {"victim_loss", to_string(g.victim)},
          {"rows", std::move(rows)}};
}

json to_json(const Summary& s) {
  return {{"n", s.n},         {"min", s.min}, {"p25", s.p25}, {"median", s.median},
          {"p75", s.p75}, {"max", s.max}, {"mean", s.mean}};
}

json to_json(const TestTarget& t) { return {{"x", t.x}, {"y", t.y}}; }

TestTarget target_from_json(const json& j) {
  try {
    TestTarget t{j.at("x").get<std::vector<double>>(), j.at("y").get<int>()};
    t.validate(t.x.size());
    return t;
  } catch (const json::exception& e) {
    throw InputError(std::string("bad target JSON: ") + e.what());
  }
}

}  // namespace flipbound
