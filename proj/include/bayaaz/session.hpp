#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "bayaaz/generator.hpp"

namespace bayaaz {

struct InteractiveSession {
  std::string session_id;
  std::string context;
  std::size_t top_n = 5;
  std::vector<WordChoice> pending;
};

// Starts a session at `context`. A non-empty context that does not end in
// whitespace gets a trailing space so suggestions are whole next words.
InteractiveSession start_session(const Checkpoint& ck, std::string session_id,
                                 std::string context, std::size_t top_n = 5,
                                 const WordSearchOptions& options = {});

// Appends pending[choice] plus a space, then recomputes suggestions.
// Throws Error{choice} when `choice` is out of range.
InteractiveSession advance_session(const Checkpoint& ck, const InteractiveSession& session,
                                   std::size_t choice, const WordSearchOptions& options = {});

// Thread-safe registry of live sessions with idle expiry. Each session is
// mutated by at most one caller at a time.
class SessionStore {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionStore(std::chrono::seconds timeout,
                        std::function<Clock::time_point()> now = Clock::now);

  InteractiveSession start(const Checkpoint& ck, std::string context, std::size_t top_n,
                           const WordSearchOptions& options = {});

  // Throws Error{session} for unknown or expired ids, Error{choice} for a bad
  // index (the session is left unchanged).
  InteractiveSession choose(const std::string& session_id, std::size_t choice,
                            const WordSearchOptions& options = {});

  std::size_t size() const;

 private:
  struct Entry {
    const Checkpoint* checkpoint = nullptr;
    InteractiveSession session;
    Clock::time_point touched;
    std::mutex lock;
  };

  std::string next_id();
  void evict_expired(Clock::time_point now);

  std::chrono::seconds timeout_;
  std::function<Clock::time_point()> now_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_ = 0;
};

}  // namespace bayaaz
