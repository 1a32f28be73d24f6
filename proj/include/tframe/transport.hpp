#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "tframe/error.hpp"
#include "tframe/protocol.hpp"

namespace tframe {

using Frame = std::vector<std::uint8_t>;

/// Worker-side endpoint: ordered, reliable, bidirectional frame stream.
class WorkerEndpoint {
 public:
  virtual ~WorkerEndpoint() = default;
  virtual void send(Frame frame) = 0;
  virtual Frame receive() = 0;
};

/// Master-side view of n workers. send_to must not block on worker progress;
/// receive_any blocks until any worker delivers a frame.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::size_t worker_count() const = 0;
  virtual void send_to(std::size_t worker, Frame frame) = 0;
  virtual std::pair<std::size_t, Frame> receive_any() = 0;
};

namespace detail {

template <typename T>
class BlockingQueue {
 public:
  void push(T item) {
    {
      std::lock_guard lock(mu_);
      items_.push_back(std::move(item));
    }
    cv_.notify_one();
  }

  T pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !items_.empty(); });
    T item = std::move(items_.front());
    items_.pop_front();
    return item;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<T> items_;
};

}  // namespace detail

/// In-process transport: each worker is a thread running the given loop over
/// in-memory queues. Worker sends funnel into one master-side queue.
class LocalTransport final : public Transport {
 public:
  using WorkerLoop = std::function<void(WorkerEndpoint&)>;

  LocalTransport(std::size_t n_workers, WorkerLoop loop) {
    if (n_workers < 1) throw std::invalid_argument("LocalTransport: need at least one worker");
    endpoints_.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i)
      endpoints_.push_back(std::make_unique<LocalEndpoint>(i, incoming_));
    for (std::size_t i = 0; i < n_workers; ++i)
      threads_.emplace_back([this, i, loop] { loop(*endpoints_[i]); });
  }

  ~LocalTransport() override {
    // Wake any worker still blocked on its inbox; an exited worker simply
    // leaves the extra shutdown frame unread.
    for (auto& ep : endpoints_) ep->inbox.push(make_shutdown_frame());
    for (auto& t : threads_) t.join();
  }

  std::size_t worker_count() const override { return endpoints_.size(); }

  void send_to(std::size_t worker, Frame frame) override {
    endpoints_.at(worker)->inbox.push(std::move(frame));
  }

  std::pair<std::size_t, Frame> receive_any() override { return incoming_.pop(); }

 private:
  static Frame make_shutdown_frame() { return encode(ShutdownMsg{}); }

  struct LocalEndpoint final : WorkerEndpoint {
    LocalEndpoint(std::size_t id, detail::BlockingQueue<std::pair<std::size_t, Frame>>& out)
        : worker_id(id), outgoing(out) {}
    void send(Frame frame) override { outgoing.push({worker_id, std::move(frame)}); }
    Frame receive() override { return inbox.pop(); }

    std::size_t worker_id;
    detail::BlockingQueue<std::pair<std::size_t, Frame>>& outgoing;
    detail::BlockingQueue<Frame> inbox;
  };

  detail::BlockingQueue<std::pair<std::size_t, Frame>> incoming_;
  std::vector<std::unique_ptr<LocalEndpoint>> endpoints_;
  std::vector<std::thread> threads_;
};

}  // namespace tframe
