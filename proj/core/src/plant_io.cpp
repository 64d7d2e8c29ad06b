#include "siclab/plant_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "siclab/errors.hpp"

namespace siclab {

using nlohmann::json;

Matrix matrix_from_json(const json& rows, std::string_view field) {
  const std::string name(field);
  if (!rows.is_array() || rows.empty()) {
    throw InputError("field \"" + name + "\" must be a non-empty array of rows");
  }
  const std::size_t cols = rows.front().is_array() ? rows.front().size() : 0;
  if (cols == 0) {
    throw InputError("field \"" + name + "\" row 0 must be a non-empty array");
  }
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != cols) {
      throw InputError("field \"" + name + "\" row " + std::to_string(i) +
                       " is ragged: expected " + std::to_string(cols) + " entries");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!row[k].is_number()) {
        throw InputError("field \"" + name + "\" entry (" + std::to_string(i) +
                         "," + std::to_string(k) + ") is not a number");
      }
      out(static_cast<Index>(i), static_cast<Index>(k)) = row[k].get<double>();
    }
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

json parse_object(std::string_view text, const char* what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string(what) + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw InputError(std::string(what) + " must be a JSON object");
  return doc;
}

const json& require_field(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) {
    throw InputError(std::string("missing field \"") + field + "\"");
  }
  return *it;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

LinearSystem parse_plant_json(std::string_view text) {
  const json doc = parse_object(text, "plant file");
  return LinearSystem(matrix_from_json(require_field(doc, "A"), "A"),
                      matrix_from_json(require_field(doc, "B"), "B"));
}

std::string plant_to_json(const LinearSystem& sys) {
  json doc;
  doc["A"] = matrix_to_json(sys.a());
  doc["B"] = matrix_to_json(sys.b());
  return doc.dump();
}

FeedbackGain parse_gain_json(std::string_view text) {
  const json doc = parse_object(text, "gain file");
  return FeedbackGain(matrix_from_json(require_field(doc, "F"), "F"));
}

LinearSystem load_plant(const std::string& source) {
  if (source == "paper") return reference_plant();
  try {
    return parse_plant_json(read_file(source));
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

FeedbackGain load_gain(const std::filesystem::path& path) {
  try {
    return parse_gain_json(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace siclab
