#ifndef FB_ENGINE_SERIALIZE_HPP
#define FB_ENGINE_SERIALIZE_HPP

#include <string>

#include "engine/booster.hpp"

namespace fb {

// Lossless JSON model artifact: loading and predicting reproduces the
// in-process predictions bit-identically.
std::string model_to_json(const FittedModel& model);
FittedModel model_from_json(const std::string& text);

void save_model(const FittedModel& model, const std::string& path);
FittedModel load_model(const std::string& path);

}  // namespace fb

#endif
