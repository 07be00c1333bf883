#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rtlrc {

// Base for every error raised by the library. Callers that only need a
// message can catch this; callers that branch on the failure catch the
// concrete type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class MalformedLine : public Error {
public:
    MalformedLine(std::size_t line_no, const std::string& detail)
        : Error("line " + std::to_string(line_no) + ": malformed JSON: " + detail),
          line_no_(line_no) {}
    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::size_t line_no_;
};

class SchemaViolation : public Error {
public:
    SchemaViolation(std::size_t line_no, std::string field, const std::string& detail)
        : Error("line " + std::to_string(line_no) + ": field '" + field + "': " + detail),
          line_no_(line_no),
          field_(std::move(field)) {}
    std::size_t line_no() const noexcept { return line_no_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_no_;
    std::string field_;
};

class DuplicateId : public Error {
public:
    explicit DuplicateId(std::string id)
        : Error("duplicate sample id '" + id + "'"), id_(std::move(id)) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class UnknownSampleId : public Error {
public:
    explicit UnknownSampleId(const std::string& id) : Error("unknown sample id '" + id + "'") {}
};

// Transport-level failure talking to an HTTP service.
class HttpError : public Error {
public:
    HttpError(int status, const std::string& detail)
        : Error(detail), status_(status) {}
    // 0 when no HTTP response was received at all.
    int status() const noexcept { return status_; }

private:
    int status_;
};

class Timeout : public HttpError {
public:
    explicit Timeout(const std::string& detail) : HttpError(0, detail) {}
};

class ExternalUnavailable : public Error {
public:
    using Error::Error;
};

class EmbedServiceError : public Error {
public:
    EmbedServiceError(int status, const std::string& detail, std::size_t index = 0)
        : Error(detail), status_(status), index_(index) {}
    int status() const noexcept { return status_; }
    // Index of the first input in the failing request.
    std::size_t index() const noexcept { return index_; }

private:
    int status_;
    std::size_t index_;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(got)) {}
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t a, std::size_t b)
        : Error("length mismatch: " + std::to_string(a) + " chunks vs " + std::to_string(b) +
                " embeddings") {}
};

class BudgetImpossible : public Error {
public:
    using Error::Error;
};

class BackendHttpError : public Error {
public:
    BackendHttpError(int status, const std::string& body_excerpt)
        : Error("backend HTTP " + std::to_string(status) + ": " + body_excerpt), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

// Raised by the pipeline with the original failure nested inside
// (std::rethrow_if_nested recovers it).
class SampleError : public Error {
public:
    SampleError(std::string sample_id, const std::string& detail)
        : Error("sample '" + sample_id + "': " + detail), sample_id_(std::move(sample_id)) {}
    const std::string& sample_id() const noexcept { return sample_id_; }

private:
    std::string sample_id_;
};

}  // namespace rtlrc
