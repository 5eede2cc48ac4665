#include "icsthreat/error.hpp"

namespace icsthreat {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::DupId: return "DUP_ID";
    case ErrorCode::InvalidModel: return "INVALID_MODEL";
    case ErrorCode::DupRule: return "DUP_RULE";
    case ErrorCode::BadTactic: return "BAD_TACTIC";
    case ErrorCode::UnknownTechnique: return "UNKNOWN_TECHNIQUE";
    case ErrorCode::UnmappedCategory: return "UNMAPPED_CATEGORY";
    case ErrorCode::BadBounds: return "BAD_BOUNDS";
    case ErrorCode::DupCve: return "DUP_CVE";
    case ErrorCode::UnknownBinding: return "UNKNOWN_BINDING";
    case ErrorCode::NetworkError: return "NETWORK_ERROR";
    case ErrorCode::RateLimited: return "RATE_LIMITED";
    case ErrorCode::BadResponse: return "BAD_RESPONSE";
    case ErrorCode::IoError: return "IO_ERROR";
    }
    return "UNKNOWN";
}

} // namespace icsthreat
