#pragma once

#include <stdexcept>
#include <string>

namespace hmm {

// Base of every error the library throws. The category drives the CLI exit
// code, so keep it stable.
class Error : public std::runtime_error {
 public:
  enum class Category { range, parse, domain, accuracy, config, io };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

/// Wavelength outside a material's validity band.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(Category::range, what) {}
};

/// Malformed input file. `row()` is 1-based and counts every physical line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(Category::parse, what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Arguments outside the domain where a result is defined.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(Category::domain, what) {}
};

/// A numerical procedure could not reach its requested accuracy.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate)
      : Error(Category::accuracy, what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

}  // namespace hmm
