#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace npblog {

/// Location inside a model source text. Lines and columns are 1-based.
struct Position {
    int line = 1;
    int column = 1;
    std::size_t offset = 0;

    friend bool operator==(const Position&, const Position&) = default;
};

enum class ErrorCode {
    LexError,
    ParseError,
    UnresolvedSymbol,
    SignatureConflict,
    MultipleGenerators,
    MissingConfig,
    CycleDetected,
    UnsupportedForm,
    InvalidParam,
    DuplicateName,
    UnboundParameter,
    OutOfVocabulary,
    EvidenceTypeMismatch,
    MissingObservedOnly,
    NumberStatementInference,
    UnresolvedQuery,
    InvalidParams,
    ItemSetMismatch,
    EmptyTrace,
    ExchangeabilityViolation,
    IoError,
    ZeroProbability,
};

inline std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::LexError: return "LexError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnresolvedSymbol: return "UnresolvedSymbol";
        case ErrorCode::SignatureConflict: return "SignatureConflict";
        case ErrorCode::MultipleGenerators: return "MultipleGenerators";
        case ErrorCode::MissingConfig: return "MissingConfig";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::UnsupportedForm: return "UnsupportedForm";
        case ErrorCode::InvalidParam: return "InvalidParam";
        case ErrorCode::DuplicateName: return "DuplicateName";
        case ErrorCode::UnboundParameter: return "UnboundParameter";
        case ErrorCode::OutOfVocabulary: return "OutOfVocabulary";
        case ErrorCode::EvidenceTypeMismatch: return "EvidenceTypeMismatch";
        case ErrorCode::MissingObservedOnly: return "MissingObservedOnly";
        case ErrorCode::NumberStatementInference: return "NumberStatementInference";
        case ErrorCode::UnresolvedQuery: return "UnresolvedQuery";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::ItemSetMismatch: return "ItemSetMismatch";
        case ErrorCode::EmptyTrace: return "EmptyTrace";
        case ErrorCode::ExchangeabilityViolation: return "ExchangeabilityViolation";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ZeroProbability: return "ZeroProbability";
    }
    return "Error";
}

/// Every user-facing failure in the library. Internal invariant failures use
/// std::logic_error instead so the CLI can tell the two apart.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string message, std::optional<Position> where = std::nullopt)
        : std::runtime_error(format(code, message, where)), code_(code), detail_(std::move(message)),
          where_(where) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::optional<Position>& where() const noexcept { return where_; }

  private:
    static std::string format(ErrorCode code, const std::string& message,
                              const std::optional<Position>& where) {
        std::string out(error_code_name(code));
        if (where) {
            out += " at " + std::to_string(where->line) + ":" + std::to_string(where->column);
        }
        out += ": " + message;
        return out;
    }

    ErrorCode code_;
    std::string detail_;
    std::optional<Position> where_;
};

}  // namespace npblog
