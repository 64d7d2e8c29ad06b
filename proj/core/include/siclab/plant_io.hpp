#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "siclab/model.hpp"

namespace siclab {

// Row-major nested arrays; ragged or non-numeric rows are rejected.
Matrix matrix_from_json(const nlohmann::json& rows, std::string_view field);
nlohmann::json matrix_to_json(const Matrix& m);

// {"A": [[...], ...], "B": [[...], ...]}
LinearSystem parse_plant_json(std::string_view text);
std::string plant_to_json(const LinearSystem& sys);

// {"F": [[...], ...]}
FeedbackGain parse_gain_json(std::string_view text);

// "paper" resolves to reference_plant(); anything else is a file path.
LinearSystem load_plant(const std::string& source);
FeedbackGain load_gain(const std::filesystem::path& path);

}  // namespace siclab
