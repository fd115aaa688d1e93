#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace newsnet::topics {

/// Sharded concurrent map with get-or-compute semantics.
///
/// The compute function runs outside the lock, so two threads missing on the
/// same key may both compute; the first insert wins and every caller gets the
/// stored value.
template <class Key, class Value, class Hash = std::hash<Key>>
class ConcurrentCache {
public:
    using Ptr = std::shared_ptr<const Value>;

    template <class Compute>
    Ptr get_or_compute(const Key& key, Compute&& compute) {
        Shard& shard = shard_for(key);
        {
            std::lock_guard lock(shard.mu);
            if (auto it = shard.map.find(key); it != shard.map.end()) {
                hits_.fetch_add(1, std::memory_order_relaxed);
                return it->second;
            }
        }
        misses_.fetch_add(1, std::memory_order_relaxed);
        Ptr fresh = std::make_shared<const Value>(compute());
        std::lock_guard lock(shard.mu);
        auto [it, _] = shard.map.emplace(key, std::move(fresh));
        return it->second;
    }

    void clear() {
        for (auto& s : shards_) {
            std::lock_guard lock(s.mu);
            s.map.clear();
        }
        hits_ = 0;
        misses_ = 0;
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (auto& s : shards_) {
            std::lock_guard lock(s.mu);
            n += s.map.size();
        }
        return n;
    }

    std::uint64_t hits() const { return hits_.load(std::memory_order_relaxed); }
    std::uint64_t misses() const { return misses_.load(std::memory_order_relaxed); }

private:
    static constexpr std::size_t kShards = 16;

    struct Shard {
        mutable std::mutex mu;
        std::unordered_map<Key, Ptr, Hash> map;
    };

    Shard& shard_for(const Key& key) { return shards_[Hash{}(key) % kShards]; }

    std::array<Shard, kShards> shards_;
    std::atomic<std::uint64_t> hits_{0};
    std::atomic<std::uint64_t> misses_{0};
};

}  // namespace newsnet::topics
