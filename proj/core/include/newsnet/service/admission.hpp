#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace newsnet::service {

class AdmissionControl;

/// Held for the lifetime of one admitted query; releases its slot on destruction.
class Permit {
public:
    Permit() = default;
    Permit(Permit&& other) noexcept : owner_(other.owner_), key_(other.key_) { other.owner_ = nullptr; }
    Permit& operator=(Permit&& other) noexcept;
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit() { release(); }

    void release();
    explicit operator bool() const { return owner_ != nullptr; }

private:
    friend class AdmissionControl;
    Permit(AdmissionControl* owner, std::uint64_t key) : owner_(owner), key_(key) {}

    AdmissionControl* owner_ = nullptr;
    std::uint64_t key_ = 0;
};

/// Caps the number of concurrently active queries per client fingerprint.
/// Fingerprints are hashed with a per-instance salt; raw values are never stored.
class AdmissionControl {
public:
    explicit AdmissionControl(int limit = 2);

    /// Empty optional means throttled.
    std::optional<Permit> admit(std::string_view fingerprint);

    int limit() const { return limit_; }
    int active(std::string_view fingerprint) const;
    int total_active() const;
    /// Highest per-fingerprint concurrency seen since construction.
    int peak_active() const;

    std::uint64_t hash(std::string_view fingerprint) const;

private:
    friend class Permit;
    void release(std::uint64_t key);

    int limit_;
    std::uint64_t salt_;
    mutable std::mutex mu_;
    std::unordered_map<std::uint64_t, int> active_;
    int peak_ = 0;
};

}  // namespace newsnet::service
