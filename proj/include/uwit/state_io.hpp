#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "uwit/error.hpp"
#include "uwit/matrix.hpp"
#include "uwit/states.hpp"

namespace uwit {

// JSON density-matrix format:
//   {"dims": [dA, dB], "re": [[...], ...], "im": [[...], ...]}
// Structural problems raise Error(Format); well-formed matrices that break a
// density-matrix invariant raise InvalidStateError.

inline nlohmann::json to_json(const DensityMatrix& rho) {
  const auto& m = rho.matrix();
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    nlohmann::json re_row = nlohmann::json::array(), im_row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return {{"dims", {rho.dims().alice, rho.dims().bob}}, {"re", std::move(re)}, {"im", std::move(im)}};
}

namespace detail {

inline std::vector<std::vector<double>> read_real_rows(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::Format, std::string("missing \"") + key + "\"");
  const auto& rows = j.at(key);
  if (!rows.is_array()) throw Error(ErrorKind::Format, std::string("\"") + key + "\" must be an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& row : rows) {
    if (!row.is_array()) throw Error(ErrorKind::Format, std::string("\"") + key + "\" rows must be arrays");
    std::vector<double> values;
    for (const auto& v : row) {
      if (!v.is_number()) throw Error(ErrorKind::Format, std::string("\"") + key + "\" entries must be numbers");
      values.push_back(v.get<double>());
    }
    out.push_back(std::move(values));
  }
  return out;
}

}  // namespace detail

inline DensityMatrix density_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Format, "state file must hold a JSON object");
  if (!j.contains("dims") || !j.at("dims").is_array() || j.at("dims").size() != 2) {
    throw Error(ErrorKind::Format, "\"dims\" must be a two-element array");
  }
  std::size_t dims[2];
  for (int k = 0; k < 2; ++k) {
    const auto& d = j.at("dims")[k];
    if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) {
      throw Error(ErrorKind::Format, "\"dims\" entries must be positive integers");
    }
    dims[k] = d.get<std::size_t>();
  }
  const auto re = detail::read_real_rows(j, "re");
  const auto im = detail::read_real_rows(j, "im");
  const std::size_t n = re.size();
  if (n == 0) throw Error(ErrorKind::Format, "empty matrix");
  if (im.size() != n) throw Error(ErrorKind::Format, "\"re\" and \"im\" have different row counts");
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (re[i].size() != n || im[i].size() != n) throw Error(ErrorKind::Format, "matrix rows must be square");
    for (std::size_t k = 0; k < n; ++k) m(i, k) = Complex(re[i][k], im[i][k]);
  }
  return DensityMatrix(std::move(m), Dims{dims[0], dims[1]});
}

inline DensityMatrix parse_density_matrix(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Format, e.what());
  }
  return density_from_json(j);
}

inline DensityMatrix load_density_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Format, "cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_density_matrix(buffer.str());
}

}  // namespace uwit
