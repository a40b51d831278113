#include "safetydash/error.hpp"

namespace safetydash {

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::bad_param: return "bad_param";
    case ErrorCode::bad_dataset: return "bad_dataset";
    case ErrorCode::bad_scope: return "bad_scope";
    case ErrorCode::bad_granularity: return "bad_granularity";
    case ErrorCode::bad_date: return "bad_date";
    case ErrorCode::bad_span: return "bad_span";
    case ErrorCode::bad_filter: return "bad_filter";
    case ErrorCode::bad_category: return "bad_category";
    case ErrorCode::bad_measure: return "bad_measure";
    case ErrorCode::bad_kind: return "bad_kind";
    case ErrorCode::bad_zoom: return "bad_zoom";
    case ErrorCode::unknown_npu: return "unknown_npu";
    case ErrorCode::unknown_neighborhood: return "unknown_neighborhood";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::missing_population: return "missing_population";
    case ErrorCode::undefined_correlation: return "undefined_correlation";
    case ErrorCode::insufficient_neighborhoods: return "insufficient_neighborhoods";
    case ErrorCode::no_snapshot: return "no_snapshot";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

int http_status(ErrorCode code)
{
  switch (code) {
    case ErrorCode::unknown_npu:
    case ErrorCode::unknown_neighborhood:
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::missing_population:
    case ErrorCode::undefined_correlation:
    case ErrorCode::insufficient_neighborhoods:
      return 422;
    case ErrorCode::no_snapshot:
      return 503;
    case ErrorCode::internal:
      return 500;
    default:
      return 400;
  }
}

}  // namespace safetydash
