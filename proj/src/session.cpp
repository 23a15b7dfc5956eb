#include "bayaaz/session.hpp"

#include <cstdio>
#include <random>

#include "bayaaz/error.hpp"
#include "bayaaz/unicode.hpp"

namespace bayaaz {

InteractiveSession start_session(const Checkpoint& ck, std::string session_id,
                                 std::string context, std::size_t top_n,
                                 const WordSearchOptions& options) {
  if (top_n == 0) throw Error(ErrorKind::choice, "top_n must be at least 1");
  if (!context.empty()) {
    const std::u32string cps = unicode::decode(context);
    if (!unicode::is_whitespace(cps.back())) context += ' ';
  }
  InteractiveSession s;
  s.session_id = std::move(session_id);
  s.context = std::move(context);
  s.top_n = top_n;
  s.pending = top_n_words(ck, s.context, top_n, options);
  return s;
}

InteractiveSession advance_session(const Checkpoint& ck, const InteractiveSession& session,
                                   std::size_t choice, const WordSearchOptions& options) {
  if (choice >= session.pending.size()) {
    throw Error(ErrorKind::choice, "choice " + std::to_string(choice) + " out of range (" +
                                       std::to_string(session.pending.size()) + " pending)");
  }
  InteractiveSession next = session;
  next.context += session.pending[choice].word + " ";
  next.pending = top_n_words(ck, next.context, next.top_n, options);
  return next;
}

SessionStore::SessionStore(std::chrono::seconds timeout,
                           std::function<Clock::time_point()> now)
    : timeout_(timeout), now_(std::move(now)) {
  std::random_device rd;
  salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string SessionStore::next_id() {
  std::mt19937_64 mix(salt_ ^ (++counter_ * 0x9E3779B97F4A7C15ULL));
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016llx%08llx", static_cast<unsigned long long>(mix()),
                static_cast<unsigned long long>(counter_));
  return buf;
}

void SessionStore::evict_expired(Clock::time_point now) {
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second->touched >= timeout_) {
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

InteractiveSession SessionStore::start(const Checkpoint& ck, std::string context,
                                       std::size_t top_n, const WordSearchOptions& options) {
  std::string id;
  {
    std::lock_guard guard(mutex_);
    id = next_id();
  }
  InteractiveSession session = start_session(ck, id, std::move(context), top_n, options);
  auto entry = std::make_shared<Entry>();
  entry->checkpoint = &ck;
  entry->session = session;
  std::lock_guard guard(mutex_);
  const auto now = now_();
  evict_expired(now);
  entry->touched = now;
  sessions_.emplace(id, std::move(entry));
  return session;
}

InteractiveSession SessionStore::choose(const std::string& session_id, std::size_t choice,
                                        const WordSearchOptions& options) {
  std::shared_ptr<Entry> entry;
  {
    std::lock_guard guard(mutex_);
    evict_expired(now_());
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
      throw Error(ErrorKind::session, "no live session " + session_id);
    }
    entry = it->second;
  }
  std::lock_guard session_guard(entry->lock);
  InteractiveSession next = advance_session(*entry->checkpoint, entry->session, choice, options);
  entry->session = next;
  std::lock_guard guard(mutex_);
  entry->touched = now_();
  return next;
}

std::size_t SessionStore::size() const {
  std::lock_guard guard(mutex_);
  return sessions_.size();
}

}  // namespace bayaaz
