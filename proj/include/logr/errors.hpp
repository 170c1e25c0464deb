#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace logr {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- input / parsing ----

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Statement falls outside the conjunctive subset (e.g. top-level OR).
class UnsupportedQuery : public Error {
public:
    UnsupportedQuery(const std::string& what, std::string clause)
        : Error(what + ": " + clause), clause_(std::move(clause)) {}
    const std::string& clause() const { return clause_; }

private:
    std::string clause_;
};

class EmptyLog : public Error {
public:
    EmptyLog() : Error("log file contains no entries") {}
};

// ---- structural ----

class WidthMismatch : public Error {
public:
    WidthMismatch(std::size_t got, std::size_t want)
        : Error("pattern width " + std::to_string(got) + " does not match " +
                std::to_string(want)) {}
};

class NotNaive : public Error {
public:
    NotNaive() : Error("encoding is not naive (a pattern has != 1 feature)") {}
};

class TooManyFeatures : public Error {
public:
    TooManyFeatures(std::size_t n, std::size_t cap)
        : Error("feature count " + std::to_string(n) + " exceeds cap " +
                std::to_string(cap)) {}
};

class TooManyRows : public Error {
public:
    TooManyRows(std::size_t rows, std::size_t cap)
        : Error("distinct row count " + std::to_string(rows) + " exceeds cap " +
                std::to_string(cap)) {}
};

class KTooLarge : public Error {
public:
    KTooLarge(std::size_t k, std::size_t rows)
        : Error("k=" + std::to_string(k) + " exceeds distinct row count " +
                std::to_string(rows)) {}
};

class MissingPattern : public Error {
public:
    explicit MissingPattern(const std::string& what) : Error(what) {}
};

// ---- numerical ----

class Infeasible : public Error {
public:
    explicit Infeasible(const std::string& what) : Error(what) {}
};

class ProjectionFailed : public Error {
public:
    explicit ProjectionFailed(const std::string& what) : Error(what) {}
};

class UndefinedScore : public Error {
public:
    explicit UndefinedScore(const std::string& what) : Error(what) {}
};

class VocabularyMismatch : public Error {
public:
    explicit VocabularyMismatch(const std::string& what) : Error(what) {}
};

}  // namespace logr
