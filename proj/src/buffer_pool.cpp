#include "flatgp/buffer_pool.hpp"

#include "flatgp/errors.hpp"

#include <fmt/core.h>

#include <algorithm>

namespace flatgp {

BufferPool::BufferPool(std::size_t capacity, std::size_t buffer_size)
    : capacity_(capacity)
    , buffer_size_(buffer_size)
    , storage_(std::make_unique_for_overwrite<Code[]>(capacity * buffer_size))
    , generation_(std::make_unique<std::atomic<std::uint32_t>[]>(capacity))
{
    if (capacity == 0 || buffer_size == 0) {
        throw ConfigError("buffer pool needs a positive capacity and buffer size");
    }
    free_.reserve(capacity);
    // lowest index handed out first
    for (std::size_t i = capacity; i-- > 0;) {
        free_.push_back(static_cast<std::uint32_t>(i));
    }
}

BufferHandle BufferPool::acquire()
{
    std::lock_guard lock(mutex_);
    if (free_.empty()) {
        throw PoolExhausted(fmt::format("buffer pool exhausted: all {} buffers in use", capacity_));
    }
    const auto index = free_.back();
    free_.pop_back();
    const auto gen = generation_[index].fetch_add(1, std::memory_order_relaxed) + 1;
    ++in_use_;
    peak_ = std::max(peak_, in_use_);
    window_peak_ = std::max(window_peak_, in_use_);
    return { index, gen };
}

void BufferPool::release(BufferHandle h)
{
    std::lock_guard lock(mutex_);
    if (h.index >= capacity_ || generation_[h.index].load(std::memory_order_relaxed) != h.generation
        || h.generation % 2 == 0) {
        throw AccountingError(fmt::format("release of buffer {} that is not held by this handle", h.index));
    }
    generation_[h.index].fetch_add(1, std::memory_order_relaxed);
    free_.push_back(h.index);
    --in_use_;
}

void BufferPool::check(BufferHandle h) const
{
    if (!is_held(h)) {
        throw AccountingError(fmt::format("access to buffer {} through a released handle", h.index));
    }
}

bool BufferPool::is_held(BufferHandle h) const
{
    return h.index < capacity_ && h.generation % 2 == 1
        && generation_[h.index].load(std::memory_order_relaxed) == h.generation;
}

std::span<Code> BufferPool::data(BufferHandle h)
{
    check(h);
    return { storage_.get() + std::size_t { h.index } * buffer_size_, buffer_size_ };
}

std::span<const Code> BufferPool::data(BufferHandle h) const
{
    check(h);
    return { storage_.get() + std::size_t { h.index } * buffer_size_, buffer_size_ };
}

std::size_t BufferPool::in_use() const
{
    std::lock_guard lock(mutex_);
    return in_use_;
}

std::size_t BufferPool::peak() const
{
    std::lock_guard lock(mutex_);
    return peak_;
}

std::size_t BufferPool::window_peak() const
{
    std::lock_guard lock(mutex_);
    return window_peak_;
}

void BufferPool::begin_window()
{
    std::lock_guard lock(mutex_);
    window_peak_ = in_use_;
}

void FragmentStore::reset(std::size_t slots)
{
    fragments_.clear();
    fragments_.resize(slots);
    total_bytes_.store(0, std::memory_order_relaxed);
}

void FragmentStore::put(std::size_t slot, TreeView fragment)
{
    put(slot, std::vector<Code>(fragment.begin(), fragment.end()));
}

void FragmentStore::put(std::size_t slot, std::vector<Code>&& fragment)
{
    if (slot >= fragments_.size()) {
        throw BoundsError(fmt::format("fragment slot {} out of range", slot));
    }
    drop(slot);
    total_bytes_.fetch_add(fragment.size(), std::memory_order_relaxed);
    fragments_[slot] = std::move(fragment);
}

TreeView FragmentStore::get(std::size_t slot) const
{
    if (slot >= fragments_.size() || fragments_[slot].empty()) {
        throw BoundsError(fmt::format("no fragment stored for child {}", slot));
    }
    return fragments_[slot];
}

void FragmentStore::drop(std::size_t slot)
{
    if (slot >= fragments_.size()) {
        return;
    }
    auto& f = fragments_[slot];
    total_bytes_.fetch_sub(f.size(), std::memory_order_relaxed);
    std::vector<Code>().swap(f);
}

} // namespace flatgp
