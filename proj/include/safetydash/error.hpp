#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace safetydash {

// Every query-time failure the API can report. Each code maps to exactly one
// HTTP status in http_status().
enum class ErrorCode {
  bad_param,
  bad_dataset,
  bad_scope,
  bad_granularity,
  bad_date,
  bad_span,
  bad_filter,
  bad_category,
  bad_measure,
  bad_kind,
  bad_zoom,
  unknown_npu,
  unknown_neighborhood,
  not_found,
  missing_population,
  undefined_correlation,
  insufficient_neighborhoods,
  no_snapshot,
  internal,
};

std::string_view to_string(ErrorCode code);
int http_status(ErrorCode code);

class DomainError : public std::runtime_error {
 public:
  DomainError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Ingestion-time fatal errors. These abort a build; row-level problems never do.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string dataset, std::string column)
      : std::runtime_error(dataset + ": missing required column '" + column + "'"),
        dataset_(std::move(dataset)),
        column_(std::move(column)) {}

  const std::string& dataset() const { return dataset_; }
  const std::string& column() const { return column_; }

 private:
  std::string dataset_;
  std::string column_;
};

class ReferentialError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or structurally corrupt input files (snapshot, GeoJSON, config).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace safetydash
