#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <string_view>

namespace abxeval {

// Frame sequences are stored row-major: one frame per row, so a row is a
// contiguous feature vector.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Base class for everything thrown by this library. The CLI maps the
// subclasses to exit codes: ConfigError -> 2, everything else -> 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

enum class Language { en, fr };
enum class Side { A, B };

inline std::string_view to_string(Language l) {
  return l == Language::en ? "en" : "fr";
}

inline std::string_view to_string(Side s) {
  return s == Side::A ? "A" : "B";
}

inline Language parse_language(std::string_view s) {
  if (s == "en") return Language::en;
  if (s == "fr") return Language::fr;
  throw ParseError("unknown language '" + std::string(s) + "' (expected 'en' or 'fr')");
}

inline Side parse_side(std::string_view s) {
  if (s == "A") return Side::A;
  if (s == "B") return Side::B;
  throw ParseError("unknown side '" + std::string(s) + "' (expected 'A' or 'B')");
}

constexpr Language kLanguages[] = {Language::en, Language::fr};

}  // namespace abxeval
