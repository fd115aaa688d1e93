#include "newsnet/service/admission.hpp"

#include <algorithm>
#include <random>

#include "newsnet/errors.hpp"

namespace newsnet::service {

Permit& Permit::operator=(Permit&& other) noexcept {
    if (this != &other) {
        release();
        owner_ = other.owner_;
        key_ = other.key_;
        other.owner_ = nullptr;
    }
    return *this;
}

void Permit::release() {
    if (owner_ != nullptr) {
        owner_->release(key_);
        owner_ = nullptr;
    }
}

AdmissionControl::AdmissionControl(int limit) : limit_(limit) {
    if (limit < 1) throw InvalidArgument("query_limit", "must be >= 1");
    std::random_device rd;
    salt_ = (std::uint64_t{rd()} << 32) ^ rd();
}

std::uint64_t AdmissionControl::hash(std::string_view fingerprint) const {
    // FNV-1a over salt bytes then fingerprint bytes
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 0x100000001b3ULL;
    };
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(salt_ >> (i * 8)));
    for (char c : fingerprint) mix(static_cast<unsigned char>(c));
    return h;
}

std::optional<Permit> AdmissionControl::admit(std::string_view fingerprint) {
    const auto key = hash(fingerprint);
    std::lock_guard lock(mu_);
    int& n = active_[key];
    if (n >= limit_) return std::nullopt;
    ++n;
    peak_ = std::max(peak_, n);
    return Permit(this, key);
}

void AdmissionControl::release(std::uint64_t key) {
    std::lock_guard lock(mu_);
    auto it = active_.find(key);
    if (it == active_.end()) return;
    if (--it->second <= 0) active_.erase(it);
}

int AdmissionControl::active(std::string_view fingerprint) const {
    const auto key = hash(fingerprint);
    std::lock_guard lock(mu_);
    auto it = active_.find(key);
    return it == active_.end() ? 0 : it->second;
}

int AdmissionControl::total_active() const {
    std::lock_guard lock(mu_);
    int n = 0;
    for (const auto& [_, c] : active_) n += c;
    return n;
}

int AdmissionControl::peak_active() const {
    std::lock_guard lock(mu_);
    return peak_;
}

}  // namespace newsnet::service
