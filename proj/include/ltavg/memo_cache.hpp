#pragma once

#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ltavg {

/// Thread-safe memo table. Values must be pure functions of the key, so a racing
/// double computation is harmless: both writers store the same value.
template <class Key, class Value, class Hash = std::hash<Key>>
class MemoCache {
public:
    std::optional<Value> find(const Key& k) const
    {
        std::shared_lock lock(mutex_);
        auto it = map_.find(k);
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }

    void insert(const Key& k, const Value& v)
    {
        std::unique_lock lock(mutex_);
        map_.emplace(k, v);
    }

    template <class Compute>
    Value get_or_compute(const Key& k, Compute&& compute)
    {
        if (auto hit = find(k)) return *hit;
        Value v = compute();
        insert(k, v);
        return v;
    }

    std::size_t size() const
    {
        std::shared_lock lock(mutex_);
        return map_.size();
    }

    std::vector<std::pair<Key, Value>> snapshot() const
    {
        std::shared_lock lock(mutex_);
        return {map_.begin(), map_.end()};
    }

    void clear()
    {
        std::unique_lock lock(mutex_);
        map_.clear();
    }

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<Key, Value, Hash> map_;
};

} // namespace ltavg
