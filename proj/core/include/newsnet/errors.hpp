#pragma once

#include <stdexcept>
#include <string>

namespace newsnet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record. `field()` names the offending field.
class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& what)
        : Error("field '" + field + "': " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Entity type outside {actor, location, organization}.
class ClassificationError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    InvalidArgument(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class DuplicateDocument : public Error {
public:
    explicit DuplicateDocument(const std::string& doc_id)
        : Error("document already inserted: " + doc_id) {}
};

class MergeConflict : public Error {
public:
    explicit MergeConflict(const std::string& doc_id)
        : Error("document present in both stores: " + doc_id) {}
};

class SnapshotError : public Error {
public:
    enum class Kind { io, version, corrupt };
    SnapshotError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// No edges exist in the requested (range, outlets) context.
class NoDataError : public Error {
public:
    using Error::Error;
};

/// An edge that cannot be scored (no documents or zero distance mass).
class AbsentEdgeError : public Error {
public:
    using Error::Error;
};

class UnknownNode : public Error {
public:
    explicit UnknownNode(const std::string& id) : Error("unknown node: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

}  // namespace newsnet
