#pragma once

// JSON views of the result types. Timing fields are opt-in so that reports
// meant for byte comparison stay deterministic.

#include <json.hpp>

#include "flipbound/bounds.hpp"
#include "flipbound/exact.hpp"
#include "flipbound/harness.hpp"
#include "flipbound/lower.hpp"
#include "flipbound/sanitize.hpp"
#include "flipbound/trainer.hpp"
#include "flipbound/upper.hpp"

namespace flipbound {

using nlohmann::json;

json to_json(const LinearClassifier& c);
LinearClassifier classifier_from_json(const json& j);

/// {w, b, loss, seed}
json to_json(const LinearClassifier& c, LossKind loss, std::uint64_t seed);

json to_json(const ExactResult& r);
json to_json(const LowerBoundReport& r, bool with_timings = false);
json to_json(const UpperBoundReport& r);
json to_json(const ComparisonTable& t);
json to_json(const Grid& g);
json to_json(const Summary& s);
json to_json(const TestTarget& t);
TestTarget target_from_json(const json& j);

}  // namespace flipbound
